//! Linear maps between Milnor rings and B-models: verification certificates,
//! equivariance, diagonal scaling solutions, extension to orbifolds and
//! tensor combination over disjoint sums.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{basis_vector, collect_sparse, sparse_eq, Check, FrobeniusAlgebra, SparseVec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernel::rational::{fmt_rat, rational_root};
use crate::kernel::{Field, Modulus, Monomial, Polynomial, Rational, Scalar, Vars};
use crate::linalg::{self, smith_normal_form};
use crate::milnor::MilnorRing;
use crate::orbifold::{build_bmodel_with, BModel, BModelOptions};
use crate::symmetry::{is_well_behaved, GroupElement, SymmetryGroup};

/// Either kind of algebra a map can run between.
#[derive(Clone, Debug)]
pub enum Algebra {
    Milnor(Arc<MilnorRing>),
    BModel(Arc<BModel>),
}

impl Algebra {
    pub fn as_dyn(&self) -> &dyn FrobeniusAlgebra {
        match self {
            Algebra::Milnor(r) => r.as_ref(),
            Algebra::BModel(b) => b.as_ref(),
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        match self {
            Algebra::Milnor(r) => r.polynomial(),
            Algebra::BModel(b) => b.polynomial(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.polynomial().nvars()
    }

    pub fn dim(&self) -> usize {
        self.as_dyn().dim()
    }

    pub fn milnor(&self) -> Option<&Arc<MilnorRing>> {
        match self {
            Algebra::Milnor(r) => Some(r),
            Algebra::BModel(_) => None,
        }
    }

    pub fn bmodel(&self) -> Option<&Arc<BModel>> {
        match self {
            Algebra::BModel(b) => Some(b),
            Algebra::Milnor(_) => None,
        }
    }

    fn labels(&self) -> Vec<String> {
        let a = self.as_dyn();
        (0..a.dim()).map(|i| a.label(i)).collect()
    }

    fn describe(&self) -> String {
        match self {
            Algebra::Milnor(r) => format!("Q[{}]", r.polynomial()),
            Algebra::BModel(b) => format!("B[{}, G of order {}]", b.polynomial(), b.group().order()),
        }
    }
}

impl From<MilnorRing> for Algebra {
    fn from(r: MilnorRing) -> Self {
        Algebra::Milnor(Arc::new(r))
    }
}

impl From<BModel> for Algebra {
    fn from(b: BModel) -> Self {
        Algebra::BModel(Arc::new(b))
    }
}

/// A linear map given by the images of the source basis.
#[derive(Clone, Debug)]
pub struct FrobeniusMap {
    source: Algebra,
    target: Algebra,
    images: Vec<SparseVec>,
}

impl FrobeniusMap {
    pub fn new(source: Algebra, target: Algebra, images: Vec<SparseVec>) -> Result<FrobeniusMap> {
        if images.len() != source.dim() {
            return Err(Error::DimensionMismatch(images.len(), source.dim()));
        }
        let td = target.dim();
        if let Some(bad) = images.iter().flatten().find(|(k, _)| *k >= td) {
            return Err(Error::BasisMismatch(format!("image index {} outside target basis of size {td}", bad.0)));
        }
        let images = images.into_iter().map(collect_sparse).collect();
        Ok(FrobeniusMap { source, target, images })
    }

    pub fn identity(a: Algebra) -> FrobeniusMap {
        let images = (0..a.dim()).map(basis_vector).collect();
        FrobeniusMap { source: a.clone(), target: a, images }
    }

    /// `e_i ↦ c_i · e_{σ(i)}` from `(i, σ(i), c_i)` triples.
    pub fn diagonal(source: Algebra, target: Algebra, entries: &[(usize, usize, Scalar)]) -> Result<FrobeniusMap> {
        let mut images = vec![Vec::new(); source.dim()];
        for (i, j, c) in entries {
            if *i >= images.len() {
                return Err(Error::BasisMismatch(format!("source index {i} out of range")));
            }
            images[*i] = vec![(*j, c.clone())];
        }
        FrobeniusMap::new(source, target, images)
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn image(&self, i: usize) -> &SparseVec {
        &self.images[i]
    }

    pub fn images(&self) -> &[SparseVec] {
        &self.images
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        collect_sparse(v.iter().flat_map(|(i, c)| self.images[*i].iter().map(move |(k, x)| (*k, c * x))))
    }

    /// `(target index, constant)` per source basis element when the map is
    /// diagonal: every image a nonzero multiple of a distinct basis element.
    pub fn diagonal_constants(&self) -> Option<Vec<(usize, Scalar)>> {
        let mut used = vec![false; self.target.dim()];
        let mut out = Vec::with_capacity(self.images.len());
        for img in &self.images {
            let [(k, c)] = img.as_slice() else { return None };
            if used[*k] || c.is_zero() {
                return None;
            }
            used[*k] = true;
            out.push((*k, c.clone()));
        }
        Some(out)
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal_constants().is_some()
    }

    /// Matrix with one column per source basis element.
    pub fn matrix(&self) -> linalg::Matrix {
        let mut m = vec![vec![Scalar::zero(); self.source.dim()]; self.target.dim()];
        for (j, img) in self.images.iter().enumerate() {
            for (i, c) in img {
                m[*i][j] = c.clone();
            }
        }
        m
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FrobeniusMap) -> Result<FrobeniusMap> {
        if inner.target.labels() != self.source.labels() {
            return Err(Error::BasisMismatch(format!(
                "cannot compose: {} is not {}",
                inner.target.describe(),
                self.source.describe()
            )));
        }
        let images = inner.images.iter().map(|v| self.apply(v)).collect();
        FrobeniusMap::new(inner.source.clone(), self.target.clone(), images)
    }

    pub fn inverse(&self) -> Option<FrobeniusMap> {
        if self.source.dim() != self.target.dim() {
            return None;
        }
        let inv = linalg::inverse(&self.matrix())?;
        let n = self.source.dim();
        let images = (0..n).map(|j| collect_sparse((0..n).map(|i| (i, inv[i][j].clone())))).collect();
        Some(FrobeniusMap { source: self.target.clone(), target: self.source.clone(), images })
    }

    /// One line `label -> image` per source basis element.
    pub fn describe(&self) -> Vec<String> {
        let (s, t) = (self.source.as_dyn(), self.target.as_dyn());
        self.images.iter().enumerate().map(|(i, v)| format!("{} -> {}", s.label(i), t.format_vec(v))).collect()
    }

    /// Exact equality of images, with both sides over the same bases.
    pub fn same_images(&self, other: &FrobeniusMap) -> bool {
        self.source.labels() == other.source.labels()
            && self.target.labels() == other.target.labels()
            && self.images.iter().zip(&other.images).all(|(a, b)| sparse_eq(a, b))
    }
}

/// Outcome of verifying that a map is an isomorphism of graded Frobenius algebras.
#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub source: String,
    pub target: String,
    pub checks: Vec<Check>,
}

impl IsoCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

impl fmt::Display for IsoCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}: {}", self.source, self.target, if self.passed() { "pass" } else { "FAIL" })?;
        for c in &self.checks {
            write!(f, "\n  {c}")?;
        }
        Ok(())
    }
}

/// Exhaustive isomorphism check. When `group` is given the certificate also
/// records equivariance.
pub fn verify_frobenius_iso(f: &FrobeniusMap, group: Option<&SymmetryGroup>, exec: Exec) -> IsoCertificate {
    let (s, t) = (f.source.as_dyn(), f.target.as_dyn());
    let mut cert = IsoCertificate { source: f.source.describe(), target: f.target.describe(), checks: Vec::new() };
    let n = s.dim();
    let dims_ok = n == t.dim();
    cert.checks.push(Check::single("dimensions", dims_ok, || format!("source has {} elements, target {}", n, t.dim())));
    if !dims_ok {
        return cert;
    }

    let rank = linalg::rank(&f.matrix());
    cert.checks.push(Check::single("bijective", rank == n, || format!("rank {rank} < {n}")));

    let unit = f.image(s.unit());
    cert.checks.push(Check::single("unit", sparse_eq(unit, &basis_vector(t.unit())), || {
        format!("1 -> {}", t.format_vec(unit))
    }));

    let graded: Vec<String> = (0..n)
        .flat_map(|i| {
            f.image(i).iter().filter(move |(k, _)| t.degree(*k) != s.degree(i)).map(move |(k, _)| {
                format!(
                    "{} (degree {}) has image component {} (degree {})",
                    s.label(i),
                    fmt_rat(s.degree(i)),
                    t.label(*k),
                    fmt_rat(t.degree(*k))
                )
            })
        })
        .collect();
    cert.checks.push(Check::from_failures("graded", n, graded));

    let products: Vec<String> = exec
        .map_range(n, |i| {
            (i..n)
                .filter_map(|j| {
                    let left = f.apply(s.product(i, j));
                    let right = t.multiply(f.image(i), f.image(j));
                    (!sparse_eq(&left, &right)).then(|| {
                        format!(
                            "f({a} * {b}) = {l} but f({a}) * f({b}) = {r}",
                            a = s.label(i),
                            b = s.label(j),
                            l = t.format_vec(&left),
                            r = t.format_vec(&right)
                        )
                    })
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    cert.checks.push(Check::from_failures("products", n * (n + 1) / 2, products));

    let pairings: Vec<String> = exec
        .map_range(n, |i| {
            (i..n)
                .filter_map(|j| {
                    let before = s.pairing(i, j);
                    let after = t.pair(f.image(i), f.image(j));
                    (before != &after).then(|| {
                        format!("<{a}, {b}> = {before} but <f({a}), f({b})> = {after}", a = s.label(i), b = s.label(j))
                    })
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    cert.checks.push(Check::from_failures("pairings", n * (n + 1) / 2, pairings));

    if let Some(g) = group {
        cert.checks.push(match is_equivariant(f, g) {
            Ok(c) => c,
            Err(e) => Check::single("equivariant", false, || e.to_string()),
        });
    }

    cert.checks.push(hessian_transport(f));
    cert
}

/// `f(Hess_S) = Hess_T` with exact coefficients.
fn hessian_transport(f: &FrobeniusMap) -> Check {
    let (s, t) = (f.source.as_dyn(), f.target.as_dyn());
    match (s.hessian_element(), t.hessian_element()) {
        (Some(hs), Some(ht)) => {
            let img = f.apply(&hs);
            Check::single("hessian-transport", sparse_eq(&img, &ht), || {
                format!("f({}) = {} but Hess of target is {}", s.format_vec(&hs), t.format_vec(&img), t.format_vec(&ht))
            })
        }
        _ => Check::single("hessian-transport", false, || "Hessian not represented in both algebras".into()),
    }
}

/// For every basis element and generator, the phase on the source element
/// equals the phase on every component of its image.
pub fn is_equivariant(f: &FrobeniusMap, group: &SymmetryGroup) -> Result<Check> {
    let n = group.nvars();
    if f.source.nvars() != n {
        return Err(Error::VariableCountMismatch(f.source.nvars(), n));
    }
    if f.target.nvars() != n {
        return Err(Error::VariableCountMismatch(f.target.nvars(), n));
    }
    let (s, t) = (f.source.as_dyn(), f.target.as_dyn());
    let mut bad = Vec::new();
    for g in group.generators() {
        for i in 0..s.dim() {
            let ps = s.phase(g, i);
            for (k, _) in f.image(i) {
                let pt = t.phase(g, *k);
                if pt != ps {
                    bad.push(format!(
                        "{g} acts on {} with phase {} but on {} with phase {}",
                        s.label(i),
                        fmt_rat(&ps),
                        t.label(*k),
                        fmt_rat(&pt)
                    ));
                }
            }
        }
    }
    Ok(Check::from_failures("equivariant", group.generators().len() * s.dim(), bad))
}

/// The extension `ψ` of a Milnor-ring isomorphism to the orbifolds, with the
/// models it runs between and its certificate.
#[derive(Clone, Debug)]
pub struct Extension {
    pub map: FrobeniusMap,
    pub certificate: IsoCertificate,
}

impl Extension {
    pub fn source_model(&self) -> &Arc<BModel> {
        self.map.source().bmodel().expect("extension runs between B-models")
    }

    pub fn target_model(&self) -> &Arc<BModel> {
        self.map.target().bmodel().expect("extension runs between B-models")
    }
}

fn require_milnor(a: &Algebra, side: &str) -> Result<Arc<MilnorRing>> {
    a.milnor().cloned().ok_or_else(|| Error::PreconditionFailed(format!("{side} of the map must be a Milnor ring")))
}

/// Coordinates of `c·m` in `ring`, applying `c` after reduction so that
/// extension scalars never enter the Gröbner reduction.
fn reduce_scaled(ring: &MilnorRing, m: &Monomial, c: &Scalar) -> SparseVec {
    collect_sparse(ring.reduce_term(m, &Scalar::one()).into_iter().map(|(i, x)| (i, &x * c)))
}

/// Builds `ψ(⌊p; h⌉) = ⌊φ(p); h⌉` from `φ: Q_W → Q_V` and certifies it.
pub fn extend_isomorphism(f: &FrobeniusMap, group: &SymmetryGroup, options: BModelOptions) -> Result<Extension> {
    let qw = require_milnor(&f.source, "source")?;
    let qv = require_milnor(&f.target, "target")?;
    for (name, w) in [("W", qw.polynomial()), ("V", qv.polynomial())] {
        let cert = is_well_behaved(w, group);
        if !cert.verdict {
            let why = cert.failure.map_or_else(|| "no admissible decomposition".to_string(), |x| x.to_string());
            return Err(Error::NotWellBehaved(format!("({name} = {w}, G): {why}")));
        }
    }
    let pre = verify_frobenius_iso(f, Some(group), options.exec);
    if !pre.passed() {
        return Err(Error::PreconditionFailed(format!(
            "phi is not a verified equivariant isomorphism (failed: {})",
            pre.failed_checks().join(", ")
        )));
    }
    let bw = Arc::new(build_bmodel_with(qw.polynomial(), group, options)?);
    let bv = Arc::new(build_bmodel_with(qv.polynomial(), group, options)?);
    let n = qw.nvars();
    let vnames = qv.vars().names();

    let mut images = Vec::with_capacity(bw.dim());
    for i in 0..bw.dim() {
        let (s, r) = bw.element(i);
        let sector = &bw.sectors()[s];
        let h = &sector.element;
        let t = bv
            .sector_index(h)
            .ok_or_else(|| Error::SectorImageMismatch(format!("no sector {h} in the target model")))?;
        let tsec = &bv.sectors()[t];
        let p = sector.ring.basis()[r].inject(&sector.locus, n);
        let phi_p = f.apply(&qw.reduce_term(&p, &Scalar::one()));
        let mut out = Vec::new();
        for (k, c) in phi_p {
            let m = &qv.basis()[k];
            if m.support().any(|x| !tsec.locus.contains(&x)) {
                return Err(Error::SectorImageMismatch(format!(
                    "phi({}) has term {} * {} outside fix({h})",
                    bw.label(i),
                    c,
                    m.display(vnames)
                )));
            }
            for (kk, cc) in reduce_scaled(&tsec.ring, &m.project(&tsec.locus), &c) {
                match bv.index_in_sector(t, kk) {
                    Some(idx) => out.push((idx, cc)),
                    None => {
                        return Err(Error::SectorImageMismatch(format!(
                            "phi({}) has component {} * {} outside the invariants of sector {h}",
                            bw.label(i),
                            cc,
                            tsec.ring.label(kk)
                        )))
                    }
                }
            }
        }
        images.push(collect_sparse(out));
    }
    let map = FrobeniusMap::new(Algebra::BModel(bw), Algebra::BModel(bv), images)?;
    let certificate = verify_frobenius_iso(&map, Some(group), options.exec);
    Ok(Extension { map, certificate })
}

/// `W1 + W2` over the concatenated variables, which must be disjoint.
pub fn direct_sum_polynomial(w1: &Polynomial, w2: &Polynomial) -> Result<Polynomial> {
    let (a, b) = (w1.vars().names(), w2.vars().names());
    if let Some(x) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::VariableOverlap(x.clone()));
    }
    let vars = Vars::new(a.iter().chain(b).cloned());
    Ok(w1.embed(&vars)?.add(&w2.embed(&vars)?))
}

/// `G1 × G2` acting on the concatenated variables.
pub fn direct_sum_group(g1: &SymmetryGroup, g2: &SymmetryGroup) -> SymmetryGroup {
    let (n1, n2) = (g1.nvars(), g2.nvars());
    let zero = |k: usize| std::iter::repeat_n(Rational::zero(), k);
    let gens = g1
        .generators()
        .iter()
        .map(|g| GroupElement::new(g.phases().iter().cloned().chain(zero(n2))))
        .chain(g2.generators().iter().map(|g| GroupElement::new(zero(n1).chain(g.phases().iter().cloned()))))
        .collect();
    SymmetryGroup::generated_by(n1 + n2, gens)
}

fn split_monomial(m: &Monomial, n1: usize) -> (Monomial, Monomial) {
    (Monomial::new(m.exps()[..n1].iter().copied()), Monomial::new(m.exps()[n1..].iter().copied()))
}

fn join_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial::new(a.exps().iter().chain(b.exps()).copied())
}

/// `φ(αβ) = φ1(α) φ2(β)` on `Q_{W1+W2} → Q_{V1+V2}`.
pub fn combine_isomorphisms(f1: &FrobeniusMap, f2: &FrobeniusMap, exec: Exec) -> Result<FrobeniusMap> {
    let (s1, t1) = (require_milnor(&f1.source, "source")?, require_milnor(&f1.target, "target")?);
    let (s2, t2) = (require_milnor(&f2.source, "source")?, require_milnor(&f2.target, "target")?);
    for (k, f) in [(1, f1), (2, f2)] {
        let c = verify_frobenius_iso(f, None, exec);
        if !c.passed() {
            return Err(Error::PreconditionFailed(format!(
                "summand map {k} is not a verified isomorphism (failed: {})",
                c.failed_checks().join(", ")
            )));
        }
    }
    let w = direct_sum_polynomial(s1.polynomial(), s2.polynomial())?;
    let v = direct_sum_polynomial(t1.polynomial(), t2.polynomial())?;
    let qw = MilnorRing::with_exec(&w, exec)?;
    let qv = MilnorRing::with_exec(&v, exec)?;
    let n1 = s1.nvars();
    let mut images = Vec::with_capacity(qw.mu());
    for m in qw.basis() {
        let (a, b) = split_monomial(m, n1);
        let (Some(ia), Some(ib)) = (s1.index_of(&a), s2.index_of(&b)) else {
            return Err(Error::BasisMismatch(format!(
                "{} does not factor over the summand bases",
                m.display(qw.vars().names())
            )));
        };
        let mut out = Vec::new();
        for (ka, ca) in f1.image(ia) {
            for (kb, cb) in f2.image(ib) {
                let mono = join_monomials(&t1.basis()[*ka], &t2.basis()[*kb]);
                out.extend(reduce_scaled(&qv, &mono, &(ca * cb)));
            }
        }
        images.push(collect_sparse(out));
    }
    FrobeniusMap::new(qw.into(), qv.into(), images)
}

/// Tensor product of two extended maps, landing on `B[W1+W2, G1×G2]`.
pub fn combine_extended(psi1: &FrobeniusMap, psi2: &FrobeniusMap) -> Result<FrobeniusMap> {
    let pick = |f: &FrobeniusMap| -> Result<(Arc<BModel>, Arc<BModel>)> {
        match (f.source.bmodel(), f.target.bmodel()) {
            (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
            _ => Err(Error::PreconditionFailed("combine_extended expects maps between B-models".into())),
        }
    };
    let (s1, t1) = pick(psi1)?;
    let (s2, t2) = pick(psi2)?;
    let options = *s1.options();
    let w = direct_sum_polynomial(s1.polynomial(), s2.polynomial())?;
    let v = direct_sum_polynomial(t1.polynomial(), t2.polynomial())?;
    let bw = build_bmodel_with(&w, &direct_sum_group(s1.group(), s2.group()), options)?;
    let bv = build_bmodel_with(&v, &direct_sum_group(t1.group(), t2.group()), options)?;
    let n1 = s1.polynomial().nvars();
    let m1 = t1.polynomial().nvars();

    // locate a model element from its sector and ambient monomial
    let ambient = |b: &BModel, i: usize| -> (GroupElement, Monomial) {
        let (s, r) = b.element(i);
        let sec = &b.sectors()[s];
        (sec.element.clone(), sec.ring.basis()[r].inject(&sec.locus, b.polynomial().nvars()))
    };
    let find = |b: &BModel, g: &GroupElement, m: &Monomial| -> Result<usize> {
        let s = b.sector_index(g).ok_or_else(|| Error::BasisMismatch(format!("no sector {g}")))?;
        let sec = &b.sectors()[s];
        b.index_of(g, &m.project(&sec.locus)).ok_or_else(|| {
            Error::BasisMismatch(format!(
                "{} is not a basis element of sector {g}",
                m.display(b.polynomial().vars().names())
            ))
        })
    };
    let split_element = |g: &GroupElement, k: usize| {
        (GroupElement::new(g.phases()[..k].iter().cloned()), GroupElement::new(g.phases()[k..].iter().cloned()))
    };

    let mut images = Vec::with_capacity(bw.dim());
    for i in 0..bw.dim() {
        let (g, m) = ambient(&bw, i);
        let (g1, g2) = split_element(&g, n1);
        let (a, b) = split_monomial(&m, n1);
        let i1 = find(&s1, &g1, &a)?;
        let i2 = find(&s2, &g2, &b)?;
        let mut out = Vec::new();
        for (k1, c1) in psi1.image(i1) {
            let (h1, x1) = ambient(&t1, *k1);
            for (k2, c2) in psi2.image(i2) {
                let (h2, x2) = ambient(&t2, *k2);
                let h = GroupElement::new(h1.phases().iter().chain(h2.phases()).cloned());
                debug_assert_eq!(h.len(), m1 + t2.polynomial().nvars());
                out.push((find(&bv, &h, &join_monomials(&x1, &x2))?, c1 * c2));
            }
        }
        images.push(collect_sparse(out));
    }
    FrobeniusMap::new(bw.into(), bv.into(), images)
}

/// `c^exponent = value` over the per-variable unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub exponent: Vec<i64>,
    pub value: Rational,
    pub origin: String,
}

impl Constraint {
    pub fn display(&self, vars: &[String]) -> String {
        let lhs: Vec<String> = self
            .exponent
            .iter()
            .zip(vars)
            .filter(|(e, _)| **e != 0)
            .map(|(e, v)| if *e == 1 { format!("c_{v}") } else { format!("c_{v}^{e}") })
            .collect();
        let lhs = if lhs.is_empty() { "1".to_string() } else { lhs.join("*") };
        format!("{lhs} = {} ({})", fmt_rat(&self.value), self.origin)
    }
}

/// Solution of a binomial system `c^{e_k} = r_k`.
#[derive(Clone, Debug)]
pub struct BinomialSolution {
    pub values: Vec<Scalar>,
    pub field: Field,
}

#[derive(Clone, Debug)]
pub enum BinomialOutcome {
    Solved(BinomialSolution),
    /// A combination of the constraints forces `1 = value`.
    Inconsistent {
        exponent_row: Vec<BigInt>,
        value: Rational,
    },
}

fn rational_pow(q: &Rational, e: &BigInt) -> Result<Rational> {
    let k = e.abs().to_u32().ok_or_else(|| Error::NotBinomialSolvable(format!("exponent {e} too large")))?;
    let p = num_traits::pow(q.clone(), k as usize);
    Ok(if e.is_negative() { p.recip() } else { p })
}

/// Solves `∏_i c_i^{e_ki} = r_k` (all `r_k ≠ 0`) via the Smith form of the
/// exponent matrix, adjoining at most one root.
pub fn solve_binomial_system(nvars: usize, eqs: &[(Vec<i64>, Rational)], symbol: &str) -> Result<BinomialOutcome> {
    if eqs.is_empty() {
        return Ok(BinomialOutcome::Solved(BinomialSolution {
            values: vec![Scalar::one(); nvars],
            field: Field::rationals(),
        }));
    }
    let a: Vec<Vec<BigInt>> = eqs.iter().map(|(e, _)| e.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let snf = smith_normal_form(&a);
    let mut rho = Vec::with_capacity(eqs.len());
    for row in &snf.u {
        let mut acc = Rational::one();
        for (u, (_, r)) in row.iter().zip(eqs) {
            if !u.is_zero() {
                acc *= rational_pow(r, u)?;
            }
        }
        rho.push(acc);
    }
    for (l, r) in rho.iter().enumerate().skip(snf.rank) {
        if !r.is_one() {
            return Ok(BinomialOutcome::Inconsistent { exponent_row: snf.u[l].clone(), value: r.clone() });
        }
    }
    let mut field = Field::rationals();
    let mut delta = vec![Scalar::one(); nvars];
    for l in 0..snf.rank {
        let d = snf.d[l]
            .to_u32()
            .ok_or_else(|| Error::NotBinomialSolvable(format!("invariant factor {} too large", snf.d[l])))?;
        if let Some(q) = rational_root(&rho[l], d) {
            delta[l] = Scalar::rational(q);
        } else if field.is_rational() {
            let m = Modulus::root_of(symbol, d as usize, &rho[l])?;
            field = Field::extension(m);
            delta[l] = Scalar::generator(&field);
        } else {
            return Err(Error::NotBinomialSolvable(format!(
                "second extension needed for a root of t^{d} = {} over {}",
                fmt_rat(&rho[l]),
                field.modulus().map_or(String::new(), |m| m.to_string())
            )));
        }
    }
    let mut values = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let mut acc = Scalar::one_in(&field);
        for (j, d) in delta.iter().enumerate() {
            let e = snf.v[i][j].to_i64().ok_or_else(|| Error::NotBinomialSolvable("exponent overflow".into()))?;
            if e != 0 {
                let p = d.pow(e).ok_or_else(|| Error::NotBinomialSolvable("root is a zero divisor".into()))?;
                acc = &acc * &p;
            }
        }
        values.push(acc);
    }
    Ok(BinomialOutcome::Solved(BinomialSolution { values, field }))
}

/// A diagonal scaling isomorphism `m ↦ c^m · m` together with the evidence
/// that produced it.
#[derive(Clone, Debug)]
pub struct ScalingSolution {
    pub map: FrobeniusMap,
    /// One constant per variable.
    pub constants: Vec<Scalar>,
    pub field: Field,
    /// Constraints from product tables and pairings.
    pub pairing_route: Vec<Constraint>,
    /// Constraints from product tables and Hessian transport.
    pub hessian_route: Vec<Constraint>,
    /// `φ(e_top) = λ e_top` on the top-degree basis monomial.
    pub top_constant: Rational,
    pub certificate: IsoCertificate,
}

#[derive(Clone, Debug)]
pub enum ScalingOutcome {
    Found(Box<ScalingSolution>),
    /// No scaling map exists; the listed constraints cannot hold together.
    Infeasible(Vec<String>),
}

impl ScalingOutcome {
    pub fn found(&self) -> Option<&ScalingSolution> {
        match self {
            ScalingOutcome::Found(s) => Some(s),
            ScalingOutcome::Infeasible(_) => None,
        }
    }
}

fn diff(a: &Monomial, b: &Monomial, c: &Monomial) -> Vec<i64> {
    (0..a.nvars()).map(|i| a.exp(i) as i64 + b.exp(i) as i64 - c.exp(i) as i64).collect()
}

/// The target's structure constants rewritten in the source's monomial
/// basis, whose classes must also form a basis of the target.
struct Rebased {
    cols: Vec<SparseVec>,
    products: Vec<Vec<SparseVec>>,
    pairing: Vec<Vec<Scalar>>,
    hessian: Scalar,
}

fn rebase(s: &MilnorRing, t: &MilnorRing) -> Result<Rebased> {
    let mu = s.mu();
    if t.mu() != mu {
        return Err(Error::DimensionMismatch(mu, t.mu()));
    }
    let cols: Vec<SparseVec> = s.basis().iter().map(|m| t.reduce_term(m, &Scalar::one())).collect();
    let mut p = vec![vec![Scalar::zero(); mu]; mu];
    for (j, col) in cols.iter().enumerate() {
        for (i, c) in col {
            p[*i][j] = c.clone();
        }
    }
    let pinv = linalg::inverse(&p)
        .ok_or_else(|| Error::BasisMismatch("source monomial basis is not a basis of the target ring".into()))?;
    let coords = |v: &SparseVec| -> SparseVec {
        collect_sparse((0..mu).map(|i| {
            let mut acc = Scalar::zero();
            for (k, c) in v {
                acc = &acc + &(&pinv[i][*k] * c);
            }
            (i, acc)
        }))
    };
    let basis = s.basis();
    let products = (0..mu)
        .map(|i| (0..mu).map(|j| coords(&t.reduce_term(&basis[i].mul(&basis[j]), &Scalar::one()))).collect())
        .collect();
    let pairing = (0..mu).map(|i| (0..mu).map(|j| t.pair(&cols[i], &cols[j])).collect()).collect();
    let (ht, hm) = t.hessian_nf();
    let h = coords(&vec![(t.index_of(hm).expect("Hessian monomial is a basis element"), ht.clone())]);
    let top = s.hessian_index();
    let hessian = match h.as_slice() {
        [(k, c)] if *k == top => c.clone(),
        _ => {
            return Err(Error::BasisMismatch(format!(
                "target Hessian is not a multiple of {} in the source basis",
                s.label(top)
            )))
        }
    };
    Ok(Rebased { cols, products, pairing, hessian })
}

fn product_constraints(s: &MilnorRing, t: &Rebased) -> std::result::Result<Vec<Constraint>, Vec<String>> {
    let basis = s.basis();
    let vars = s.vars().names();
    let n = basis.len();
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in i..n {
            let sp = FrobeniusAlgebra::product(s, i, j);
            let tp = &t.products[i][j];
            let mut keys: Vec<usize> = sp.iter().chain(tp).map(|x| x.0).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let a = sp.iter().find(|x| x.0 == k).map(|x| x.1.clone());
                let b = tp.iter().find(|x| x.0 == k).map(|x| x.1.clone());
                let origin = format!(
                    "coefficient of {} in {} * {}",
                    basis[k].display(vars),
                    basis[i].display(vars),
                    basis[j].display(vars)
                );
                match (a, b) {
                    (Some(a), Some(b)) => {
                        let value = a.to_rational().unwrap() / b.to_rational().unwrap();
                        out.push(Constraint { exponent: diff(&basis[i], &basis[j], &basis[k]), value, origin });
                    }
                    (a, b) => bad.push(format!(
                        "{origin}: source {} vs target {}",
                        a.map_or("0".into(), |x| x.to_string()),
                        b.map_or("0".into(), |x| x.to_string())
                    )),
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(bad)
    }
}

fn exponent_of(m: &Monomial) -> Vec<i64> {
    m.exps().iter().map(|&e| e as i64).collect()
}

fn solve_route(
    nvars: usize,
    constraints: &[Constraint],
    vars: &[String],
) -> Result<std::result::Result<BinomialSolution, Vec<String>>> {
    let mut eqs = Vec::new();
    let mut bad = Vec::new();
    for c in constraints {
        if c.exponent.iter().all(|&e| e == 0) {
            if !c.value.is_one() {
                bad.push(c.display(vars));
            }
        } else {
            eqs.push((c.exponent.clone(), c.value.clone()));
        }
    }
    if !bad.is_empty() {
        return Ok(Err(bad));
    }
    let symbol = ["c", "r", "s", "u"].into_iter().find(|s| !vars.iter().any(|v| v == s)).unwrap_or("alpha");
    match solve_binomial_system(nvars, &eqs, symbol)? {
        BinomialOutcome::Solved(sol) => Ok(Ok(sol)),
        BinomialOutcome::Inconsistent { exponent_row, value } => {
            let combo: Vec<String> = exponent_row
                .iter()
                .zip(&eqs)
                .zip(constraints.iter().filter(|c| c.exponent.iter().any(|&e| e != 0)))
                .filter(|((u, _), _)| !u.is_zero())
                .map(|((u, _), c)| format!("({})^{u}", c.display(vars)))
                .collect();
            Ok(Err(vec![format!("product of {} forces 1 = {}", combo.join(" * "), fmt_rat(&value))]))
        }
    }
}

fn scaling_map(s: &Arc<MilnorRing>, t: &Arc<MilnorRing>, rb: &Rebased, c: &[Scalar]) -> Result<FrobeniusMap> {
    let images = s
        .basis()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut k = Scalar::one();
            for (ci, &e) in c.iter().zip(m.exps()) {
                k = &k * &ci.pow(e as i64).unwrap();
            }
            collect_sparse(rb.cols[i].iter().map(|(j, x)| (*j, x * &k)))
        })
        .collect();
    FrobeniusMap::new(Algebra::Milnor(s.clone()), Algebra::Milnor(t.clone()), images)
}

/// Looks for `φ(m) = (∏ c_i^{a_i}) m` on the source's monomial basis, whose
/// classes must also form a basis of the target. Two independent constraint
/// sets are solved: product tables with the top-degree pairings, and product
/// tables with Hessian transport. Their solutions must agree.
pub fn solve_scaling_iso(source: &Arc<MilnorRing>, target: &Arc<MilnorRing>, exec: Exec) -> Result<ScalingOutcome> {
    if source.weights() != target.weights() {
        return Err(Error::WeightMismatch(source.weights().to_string(), target.weights().to_string()));
    }
    if source.vars().names() != target.vars().names() {
        return Err(Error::BasisMismatch("source and target use different variables".into()));
    }
    let rb = rebase(source, target)?;
    let vars = source.vars().names();
    let n = source.nvars();

    let products = match product_constraints(source, &rb) {
        Ok(c) => c,
        Err(bad) => return Ok(ScalingOutcome::Infeasible(bad)),
    };

    let mut route1 = products.clone();
    let mu = source.mu();
    for i in 0..mu {
        for j in i..mu {
            let ps = FrobeniusAlgebra::pairing(source.as_ref(), i, j);
            let pt = &rb.pairing[i][j];
            if ps.is_zero() && pt.is_zero() {
                continue;
            }
            let origin = format!("<{}, {}>", source.label(i), source.label(j));
            if ps.is_zero() || pt.is_zero() {
                return Ok(ScalingOutcome::Infeasible(vec![format!("{origin}: source {ps} vs target {pt}")]));
            }
            let e: Vec<i64> =
                (0..n).map(|v| source.basis()[i].exp(v) as i64 + source.basis()[j].exp(v) as i64).collect();
            route1.push(Constraint {
                exponent: e,
                value: ps.to_rational().unwrap() / pt.to_rational().unwrap(),
                origin,
            });
        }
    }

    let mut route2 = products;
    let (hs, hm) = source.hessian_nf();
    let top_constant = rb.hessian.to_rational().unwrap() / hs.to_rational().unwrap();
    route2.push(Constraint {
        exponent: exponent_of(hm),
        value: top_constant.clone(),
        origin: "Hessian transport".into(),
    });

    let sol1 = match solve_route(n, &route1, vars)? {
        Ok(s) => s,
        Err(bad) => return Ok(ScalingOutcome::Infeasible(bad)),
    };
    let sol2 = match solve_route(n, &route2, vars)? {
        Ok(s) => s,
        Err(bad) => return Ok(ScalingOutcome::Infeasible(bad)),
    };
    let map = scaling_map(source, target, &rb, &sol1.values)?;
    let map2 = scaling_map(source, target, &rb, &sol2.values)?;
    if sol1.field != sol2.field || !map.same_images(&map2) {
        return Err(Error::SearchInconclusive(format!(
            "pairing and Hessian routes disagree: {:?} vs {:?}",
            map.describe(),
            map2.describe()
        )));
    }
    let certificate = verify_frobenius_iso(&map, None, exec);
    Ok(ScalingOutcome::Found(Box::new(ScalingSolution {
        map,
        constants: sol1.values,
        field: sol1.field,
        pairing_route: route1,
        hessian_route: route2,
        top_constant,
        certificate,
    })))
}

/// Side-by-side comparison of a derived top-degree constant with a claimed one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantComparison {
    pub source: String,
    pub target: String,
    pub derived: Rational,
    pub claimed: Rational,
}

impl ConstantComparison {
    pub fn agrees(&self) -> bool {
        self.derived == self.claimed
    }
}

impl fmt::Display for ConstantComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}: derived c^top = {}, claimed {} ({})",
            self.source,
            self.target,
            fmt_rat(&self.derived),
            fmt_rat(&self.claimed),
            if self.agrees() { "agree" } else { "differ" }
        )
    }
}

pub fn compare_constant(sol: &ScalingSolution, claimed: Rational) -> ConstantComparison {
    ConstantComparison {
        source: sol.map.source().polynomial().to_string(),
        target: sol.map.target().polynomial().to_string(),
        derived: sol.top_constant.clone(),
        claimed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_polynomial, rat};
    use crate::symmetry::subgroup_generated;

    fn ring(s: &str) -> Arc<MilnorRing> {
        Arc::new(MilnorRing::new(&parse_polynomial(s, Some(&["x", "y"])).unwrap()).unwrap())
    }

    fn solve(a: &str, b: &str) -> ScalingOutcome {
        solve_scaling_iso(&ring(a), &ring(b), Exec::default()).unwrap()
    }

    #[test]
    fn identity_passes() {
        let r = ring("x^4 + y^4");
        let f = FrobeniusMap::identity(Algebra::Milnor(r));
        assert!(verify_frobenius_iso(&f, None, Exec::default()).passed());
        assert!(f.is_diagonal());
    }

    #[test]
    fn naive_map_fails_on_pairing() {
        let (s, t) = (ring("x^2 + y^6"), ring("x^2 + x*y^3"));
        let images = (0..s.mu()).map(|i| vec![(t.index_of(&s.basis()[i]).unwrap(), Scalar::one())]).collect();
        let f = FrobeniusMap::new(Algebra::Milnor(s), Algebra::Milnor(t), images).unwrap();
        let c = verify_frobenius_iso(&f, None, Exec::default());
        assert!(!c.get("pairings").unwrap().passed);
        assert!(c.get("products").unwrap().passed);
        assert!(c.get("pairings").unwrap().witnesses[0].contains("<1, y^4> = 1/12"));
    }

    #[test]
    fn scaling_constants() {
        let sol = solve("x^2 + y^6", "x^2 + x*y^3");
        let sol = sol.found().expect("scaling map");
        assert!(sol.certificate.passed(), "{}", sol.certificate);
        assert_eq!(sol.top_constant, rat(-1, 4));
        let c_y = &sol.constants[1];
        assert_eq!(c_y.pow(4).unwrap(), Scalar::rational(rat(-1, 4)));

        let sol = solve("x^2 + y^6", "x^2 + x*y^3 + y^6").found().unwrap().clone();
        assert_eq!(sol.top_constant, rat(3, 4));
        let sol = solve("x^2 + x*y^3", "x^2 + x*y^3 + y^6").found().unwrap().clone();
        assert_eq!(sol.top_constant, rat(-3, 1));
        let sol = solve("x^2 + x*y^3 + y^6", "x^2 + x*y^3").found().unwrap().clone();
        assert_eq!(sol.top_constant, rat(-1, 3));
        let same = solve("x^2 + y^6", "x^2 + y^6").found().unwrap().clone();
        assert!(same.map.same_images(&FrobeniusMap::identity(same.map.source().clone())));
    }

    #[test]
    fn quartic_pair_infeasible() {
        match solve("x^4 + y^4", "x^3*y + x*y^3") {
            ScalingOutcome::Infeasible(why) => assert!(!why.is_empty()),
            ScalingOutcome::Found(_) => panic!("no scaling map exists"),
        }
    }

    #[test]
    fn equivariance_witness() {
        let r = ring("x^4 + y^4");
        let y = r.index_of(&Monomial::new([0, 1])).unwrap();
        let x = r.index_of(&Monomial::new([1, 0])).unwrap();
        let mut images: Vec<SparseVec> = (0..r.mu()).map(basis_vector).collect();
        images[y] = basis_vector(x);
        let f = FrobeniusMap::new(Algebra::Milnor(r.clone()), Algebra::Milnor(r), images).unwrap();
        let g = SymmetryGroup::generated_by(2, vec![GroupElement::new([rat(1, 4), rat(0, 1)])]);
        assert!(!is_equivariant(&f, &g).unwrap().passed);
    }

    #[test]
    fn compose_and_inverse() {
        let sol = solve("x^2 + y^6", "x^2 + x*y^3").found().unwrap().clone();
        let inv = sol.map.inverse().unwrap();
        assert!(inv.is_diagonal());
        assert!(verify_frobenius_iso(&inv, None, Exec::default()).passed());
        let id = inv.compose(&sol.map).unwrap();
        assert!(id.same_images(&FrobeniusMap::identity(sol.map.source().clone())));
        for ((_, c), (_, d)) in sol.map.diagonal_constants().unwrap().iter().zip(inv.diagonal_constants().unwrap()) {
            assert!((c * &d).is_one());
        }
    }

    #[test]
    fn extension_at_n3() {
        let sol = solve("x^2 + y^6", "x^2 + x*y^3").found().unwrap().clone();
        let w = sol.map.source().polynomial().clone();
        let g = subgroup_generated(&w, &[vec![rat(1, 2), rat(1, 2)]]).unwrap();
        let ext = extend_isomorphism(&sol.map, &g, BModelOptions::default()).unwrap();
        assert!(ext.certificate.passed(), "{}", ext.certificate);
        assert_eq!(ext.map.describe()[3], "[1; (1/2,1/2)] -> [1; (1/2,1/2)]");

        let trivial = extend_isomorphism(&sol.map, &SymmetryGroup::trivial(2), BModelOptions::default()).unwrap();
        assert_eq!(trivial.map.images(), sol.map.images());
    }

    #[test]
    fn binomial_inconsistency() {
        let eqs = vec![(vec![1, 0], rat(2, 1)), (vec![2, 0], rat(3, 1))];
        assert!(matches!(solve_binomial_system(2, &eqs, "c").unwrap(), BinomialOutcome::Inconsistent { .. }));
    }

    #[test]
    fn direct_sums() {
        let a = parse_polynomial("x^2 + y^6", None).unwrap();
        let b = parse_polynomial("z^2 + w^2", None).unwrap();
        assert_eq!(direct_sum_polynomial(&a, &b).unwrap().nvars(), 4);
        assert!(matches!(direct_sum_polynomial(&a, &a), Err(Error::VariableOverlap(_))));
    }
}
