//! Orbifolded B-models `B[W, G] = ⊕_g (Q_{W|fix(g)})^G` with the sector
//! product twisted by the Hessian ratio γ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{collect_sparse, verify_axioms, AxiomReport, FrobeniusAlgebra, SparseVec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernel::rational::fmt_rat;
use crate::kernel::{Monomial, Polynomial, Rational, Scalar};
use crate::milnor::MilnorRing;
use crate::structure::{require_admissible, WeightVector};
use crate::symmetry::{
    check_symmetry, invariant_monomials_in_sector, sector_phase, DetConvention, GroupElement, SymmetryGroup,
};

/// Deliberate corruptions of the product, used to show that the axiom
/// checks are not vacuous.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mutation {
    #[default]
    None,
    /// Omit the factor `μ_{g∩h} / μ_{g+h}` from γ.
    DropMuRatio,
    /// Restrict to `fix(g+h)` by setting unfixed variables to 1 instead of 0.
    RestrictionAtOne,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BModelOptions {
    pub det: DetConvention,
    pub mutation: Mutation,
    pub exec: Exec,
}

/// `W|locus`: monomials supported on the locus, over the locus variables only.
pub fn restrict_polynomial(w: &Polynomial, locus: &[usize]) -> Polynomial {
    w.restrict(locus)
}

/// One summand `(Q_{W|fix(g)})^G`.
#[derive(Clone, Debug)]
pub struct Sector {
    pub element: GroupElement,
    pub locus: Vec<usize>,
    pub ring: Arc<MilnorRing>,
    /// Indices into `ring.basis()` of the G-invariant monomials.
    pub invariant: Vec<usize>,
    /// Position of the sector's first element in the model basis.
    pub offset: usize,
}

/// Everything that went into one product `⌊m;g⌉ ⋆ ⌊n;h⌉`.
#[derive(Clone, Debug)]
pub struct ProductEvaluation {
    pub left: usize,
    pub right: usize,
    /// Sector of `g + h`.
    pub target_sector: usize,
    /// Whether `fix(g) ∪ fix(h) ∪ fix(g+h)` covers every coordinate.
    pub covered: bool,
    pub mu_intersection: usize,
    pub mu_sum: usize,
    /// Hessian normal forms, monomials written in the ambient variables.
    pub hess_sum: Option<(Scalar, Monomial)>,
    pub hess_intersection: Option<(Scalar, Monomial)>,
    pub gamma: Option<(Scalar, Monomial)>,
    /// The product in the model basis.
    pub result: SparseVec,
    /// Components that landed outside the invariant subspace.
    pub stray: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct BModel {
    w: Polynomial,
    weights: WeightVector,
    group: SymmetryGroup,
    options: BModelOptions,
    sectors: Vec<Sector>,
    sector_of: BTreeMap<GroupElement, usize>,
    rings: BTreeMap<Vec<usize>, Arc<MilnorRing>>,
    basis: Vec<(usize, usize)>,
    degrees: Vec<Rational>,
    table: Vec<Vec<SparseVec>>,
    pairing: Vec<Vec<Scalar>>,
    violations: Vec<String>,
}

fn locus_name(w: &Polynomial, locus: &[usize]) -> String {
    let names: Vec<&str> = locus.iter().map(|&i| w.vars().names()[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn build_rings(
    w: &Polynomial,
    weights: &WeightVector,
    loci: &[(Vec<usize>, String)],
    exec: Exec,
) -> Result<Vec<(Vec<usize>, Arc<MilnorRing>)>> {
    exec.map(loci, |(locus, who)| {
        let sub = restrict_polynomial(w, locus);
        let q = WeightVector { q: locus.iter().map(|&i| weights.q[i].clone()).collect() };
        match MilnorRing::with_weights(&sub, q, Exec::Sequential) {
            Ok(r) => Ok((locus.clone(), Arc::new(r))),
            Err(Error::Degenerate(_)) | Err(Error::NotQuasihomogeneous) => {
                Err(Error::RestrictedDegenerate { element: who.clone(), poly: sub.to_string() })
            }
            Err(e) => Err(e),
        }
    })
    .into_iter()
    .collect()
}

pub fn build_bmodel(w: &Polynomial, group: &SymmetryGroup) -> Result<BModel> {
    build_bmodel_with(w, group, BModelOptions::default())
}

pub fn build_bmodel_with(w: &Polynomial, group: &SymmetryGroup, options: BModelOptions) -> Result<BModel> {
    let weights = require_admissible(w)?;
    let n = w.nvars();
    if group.nvars() != n {
        return Err(Error::PhaseLength { got: group.nvars(), expected: n });
    }
    for g in group.generators() {
        check_symmetry(w, g)?;
        if !g.in_sl() {
            return Err(Error::NotInSl(g.to_string()));
        }
    }

    let mut loci: Vec<(Vec<usize>, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    for g in group.elements() {
        let l = g.fixed_locus();
        if seen.insert(l.clone()) {
            loci.push((l, g.to_string()));
        }
    }
    let mut rings: BTreeMap<Vec<usize>, Arc<MilnorRing>> =
        build_rings(w, &weights, &loci, options.exec)?.into_iter().collect();

    // intersections needed by covered pairs
    let mut extra: Vec<(Vec<usize>, String)> = Vec::new();
    for g in group.elements() {
        for h in group.elements() {
            let k = g.add(h);
            let (fg, fh, fk) = (g.fixed_locus(), h.fixed_locus(), k.fixed_locus());
            if !(0..n).all(|i| fg.contains(&i) || fh.contains(&i) || fk.contains(&i)) {
                continue;
            }
            let inter: Vec<usize> = fg.iter().copied().filter(|i| fh.contains(i)).collect();
            if seen.insert(inter.clone()) {
                let who = format!("{g} and {h} (common fixed locus {})", locus_name(w, &inter));
                extra.push((inter, who));
            }
        }
    }
    rings.extend(build_rings(w, &weights, &extra, options.exec)?);

    let mut sectors = Vec::new();
    let mut sector_of = BTreeMap::new();
    let mut basis = Vec::new();
    let mut degrees = Vec::new();
    let two = Rational::from_integer(2.into());
    for g in group.elements() {
        let locus = g.fixed_locus();
        let ring = rings[&locus].clone();
        let inv = invariant_monomials_in_sector(ring.basis(), group, &locus, options.det);
        let invariant: Vec<usize> = inv.iter().map(|m| ring.index_of(m).unwrap()).collect();
        let shift: Rational = (0..n)
            .filter(|&i| !g.phases()[i].is_zero())
            .map(|i| Rational::from_integer(1.into()) - &weights.q[i] * &two)
            .sum();
        let s = sectors.len();
        for &r in &invariant {
            basis.push((s, r));
            degrees.push(ring.monomial_degree(&ring.basis()[r]) + &shift);
        }
        sector_of.insert(g.clone(), s);
        sectors.push(Sector { element: g.clone(), locus, ring, invariant, offset: basis.len() - inv.len() });
    }

    let mut model = BModel {
        w: w.clone(),
        weights,
        group: group.clone(),
        options,
        sectors,
        sector_of,
        rings,
        basis,
        degrees,
        table: Vec::new(),
        pairing: Vec::new(),
        violations: Vec::new(),
    };

    let dim = model.basis.len();
    let rows: Vec<Result<Vec<ProductEvaluation>>> =
        options.exec.map_range(dim, |i| (i..dim).map(|j| model.star_product(i, j)).collect());
    let mut upper = Vec::with_capacity(dim);
    let mut violations = Vec::new();
    for row in rows {
        let row = row?;
        for ev in &row {
            violations.extend(ev.stray.iter().cloned());
        }
        upper.push(row.into_iter().map(|ev| ev.result).collect::<Vec<_>>());
    }
    model.table = (0..dim)
        .map(|i| (0..dim).map(|j| if j >= i { upper[i][j - i].clone() } else { upper[j][i - j].clone() }).collect())
        .collect();
    model.violations = violations;
    model.pairing = (0..dim).map(|i| (0..dim).map(|j| model.pairing_entry(i, j)).collect()).collect();
    Ok(model)
}

impl BModel {
    pub fn polynomial(&self) -> &Polynomial {
        &self.w
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn options(&self) -> &BModelOptions {
        &self.options
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector_index(&self, g: &GroupElement) -> Option<usize> {
        self.sector_of.get(g).copied()
    }

    /// Basis element `i` as (sector index, index into that sector's ring basis).
    pub fn element(&self, i: usize) -> (usize, usize) {
        self.basis[i]
    }

    /// Model basis index of `⌊m; g⌉`, with `m` in the sector's locus variables.
    pub fn index_of(&self, g: &GroupElement, m: &Monomial) -> Option<usize> {
        let s = self.sector_index(g)?;
        let sector = &self.sectors[s];
        let r = sector.ring.index_of(m)?;
        let k = sector.invariant.iter().position(|&x| x == r)?;
        Some(sector.offset + k)
    }

    /// Model basis index of the ring basis element `r` of sector `s`, if invariant.
    pub fn index_in_sector(&self, s: usize, r: usize) -> Option<usize> {
        let sector = &self.sectors[s];
        sector.invariant.iter().position(|&x| x == r).map(|k| sector.offset + k)
    }

    pub fn element_degree(&self, i: usize) -> &Rational {
        &self.degrees[i]
    }

    pub fn ring_for_locus(&self, locus: &[usize]) -> Option<&Arc<MilnorRing>> {
        self.rings.get(locus)
    }

    pub fn is_invertible(&self) -> bool {
        self.w.num_terms() == self.w.nvars()
    }

    fn pairing_entry(&self, i: usize, j: usize) -> Scalar {
        let (s, a) = self.basis[i];
        let (t, b) = self.basis[j];
        let (g, h) = (&self.sectors[s].element, &self.sectors[t].element);
        if &h.neg() != g {
            return Scalar::zero();
        }
        // fix(g) = fix(-g): both sectors share one ring
        FrobeniusAlgebra::pairing(self.sectors[s].ring.as_ref(), a, b).clone()
    }

    /// Evaluates `e_i ⋆ e_j` from scratch, recording every ingredient.
    pub fn star_product(&self, i: usize, j: usize) -> Result<ProductEvaluation> {
        let n = self.w.nvars();
        let (s, a) = self.basis[i];
        let (t, b) = self.basis[j];
        let (sg, sh) = (&self.sectors[s], &self.sectors[t]);
        let k = sg.element.add(&sh.element);
        let u = self.sector_of[&k];
        let sk = &self.sectors[u];
        let covered = (0..n).all(|x| sg.locus.contains(&x) || sh.locus.contains(&x) || sk.locus.contains(&x));
        let mut ev = ProductEvaluation {
            left: i,
            right: j,
            target_sector: u,
            covered,
            mu_intersection: 0,
            mu_sum: sk.ring.mu(),
            hess_sum: None,
            hess_intersection: None,
            gamma: None,
            result: Vec::new(),
            stray: Vec::new(),
        };
        if !covered {
            return Ok(ev);
        }
        let inter: Vec<usize> = sg.locus.iter().copied().filter(|x| sh.locus.contains(x)).collect();
        let r_int = &self.rings[&inter];
        ev.mu_intersection = r_int.mu();
        let (hk_c, hk_m) = sk.ring.hessian_nf();
        let (hi_c, hi_m) = r_int.hessian_nf();
        let hk_amb = hk_m.inject(&sk.locus, n);
        let hi_amb = hi_m.inject(&inter, n);
        ev.hess_sum = Some((hk_c.clone(), hk_amb.clone()));
        ev.hess_intersection = Some((hi_c.clone(), hi_amb.clone()));
        let names = self.w.vars().names();
        let Some(q_mono) = hk_amb.div(&hi_amb) else {
            return Err(Error::GammaNotDivisible(format!(
                "{} * {}: Hess(W|fix(g+h)) = {}*{} is not divisible by Hess(W|fix(g)∩fix(h)) = {}*{}",
                self.label(i),
                self.label(j),
                hk_c,
                hk_amb.display(names),
                hi_c,
                hi_amb.display(names)
            )));
        };
        let mut gamma = hk_c.checked_div(hi_c).expect("nonzero Hessian coefficient");
        if self.options.mutation != Mutation::DropMuRatio {
            gamma = gamma.scale(&Rational::new(ev.mu_intersection.into(), ev.mu_sum.into()));
        }
        ev.gamma = Some((gamma.clone(), q_mono.clone()));

        let m_amb = sg.ring.basis()[a].inject(&sg.locus, n);
        let n_amb = sh.ring.basis()[b].inject(&sh.locus, n);
        let prod = q_mono.mul(&m_amb).mul(&n_amb);
        let leaves_locus = prod.support().any(|x| !sk.locus.contains(&x));
        if leaves_locus && self.options.mutation != Mutation::RestrictionAtOne {
            return Ok(ev);
        }
        let local = prod.project(&sk.locus);
        let coords = sk.ring.reduce_term(&local, &gamma);
        let mut out = Vec::new();
        for (r, c) in coords {
            match self.index_in_sector(u, r) {
                Some(idx) => out.push((idx, c)),
                None => ev.stray.push(format!(
                    "{} * {} has component {} * {} outside the invariants of sector {}",
                    self.label(i),
                    self.label(j),
                    c,
                    sk.ring.label(r),
                    sk.element
                )),
            }
        }
        ev.result = collect_sparse(out);
        Ok(ev)
    }
}

impl FrobeniusAlgebra for BModel {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn label(&self, i: usize) -> String {
        let (s, r) = self.basis[i];
        let sector = &self.sectors[s];
        format!("[{}; {}]", sector.ring.label(r), sector.element)
    }

    fn degree(&self, i: usize) -> &Rational {
        &self.degrees[i]
    }

    fn top_degree(&self) -> Rational {
        self.weights.central_charge() * Rational::from_integer(2.into())
    }

    fn unit(&self) -> usize {
        0
    }

    fn product(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    fn pairing(&self, i: usize, j: usize) -> &Scalar {
        &self.pairing[i][j]
    }

    fn hessian_element(&self) -> Option<SparseVec> {
        let ring = &self.sectors[0].ring;
        let idx = self.index_in_sector(0, ring.hessian_index())?;
        Some(vec![(idx, ring.hessian_nf().0.clone())])
    }

    fn phase(&self, g: &GroupElement, i: usize) -> Rational {
        let (s, r) = self.basis[i];
        let sector = &self.sectors[s];
        sector_phase(g, &sector.ring.basis()[r], &sector.locus, self.options.det)
    }

    fn closure_violations(&self) -> &[String] {
        &self.violations
    }
}

/// Axiom report for a B-model. For invertible `W` a failure indicates a
/// bug; for noninvertible `W` the axioms are not known to hold in general,
/// so a failure is a finding about the model.
#[derive(Clone, Debug)]
pub struct BModelReport {
    pub invertible: bool,
    pub axioms: AxiomReport,
}

impl BModelReport {
    pub fn passed(&self) -> bool {
        self.axioms.passed()
    }

    pub fn failure_kind(&self) -> Option<&'static str> {
        match (self.passed(), self.invertible) {
            (true, _) => None,
            (false, true) => Some("bug: axioms must hold for invertible polynomials"),
            (false, false) => Some("finding: axiom failure for a noninvertible polynomial"),
        }
    }
}

impl fmt::Display for BModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.axioms)?;
        if let Some(kind) = self.failure_kind() {
            write!(f, "\n{kind}")?;
        }
        Ok(())
    }
}

pub fn verify_bmodel_axioms(model: &BModel) -> BModelReport {
    BModelReport { invertible: model.is_invertible(), axioms: verify_axioms(model, model.options.exec) }
}

impl fmt::Display for ProductEvaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e{} * e{}: covered={} mu(g∩h)={} mu(g+h)={}",
            self.left, self.right, self.covered, self.mu_intersection, self.mu_sum
        )?;
        if let Some((c, _)) = &self.gamma {
            write!(f, " gamma coefficient {c}")?;
        }
        Ok(())
    }
}

/// Human-readable one-line summary of the sector structure.
pub fn describe_sectors(model: &BModel) -> Vec<String> {
    model
        .sectors()
        .iter()
        .map(|s| {
            let names: Vec<String> = s.invariant.iter().map(|&r| s.ring.label(r)).collect();
            format!(
                "sector {} fix={} mu={} invariants=[{}] degrees=[{}]",
                s.element,
                locus_name(model.polynomial(), &s.locus),
                s.ring.mu(),
                names.join(", "),
                (0..s.invariant.len())
                    .map(|k| fmt_rat(model.element_degree(s.offset + k)))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_polynomial, rat};
    use crate::symmetry::subgroup_generated;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, None).unwrap()
    }

    fn model(w: &str, gens: &[&[(i64, i64)]]) -> BModel {
        let w = p(w);
        let gens: Vec<Vec<Rational>> = gens.iter().map(|g| g.iter().map(|&(a, b)| rat(a, b)).collect()).collect();
        let g = subgroup_generated(&w, &gens).unwrap();
        build_bmodel(&w, &g).unwrap()
    }

    #[test]
    fn x2_y6_half() {
        let b = model("x^2 + y^6", &[&[(1, 2), (1, 2)]]);
        assert_eq!(b.dim(), 4);
        let labels: Vec<String> = (0..4).map(|i| b.label(i)).collect();
        assert_eq!(labels, vec!["[1; (0,0)]", "[y^2; (0,0)]", "[y^4; (0,0)]", "[1; (1/2,1/2)]"]);
        assert_eq!(b.element_degree(3), &rat(2, 3));
        assert_eq!(b.element_degree(1), &rat(2, 3));
        // [1;g] * [1;g] = [12 y^4; 0]
        assert_eq!(b.product(3, 3), &vec![(2, Scalar::from_int(12))]);
        // [y^2;0] * [1;g] = 0
        assert!(b.product(1, 3).is_empty());
        assert_eq!(FrobeniusAlgebra::pairing(&b, 3, 3), &Scalar::one());
        assert_eq!(FrobeniusAlgebra::pairing(&b, 1, 1), &Scalar::rational(rat(1, 12)));
        assert!(FrobeniusAlgebra::pairing(&b, 0, 3).is_zero());
        let r = verify_bmodel_axioms(&b);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn trivial_group_is_milnor_ring() {
        let w = p("x^3*y + x*y^3");
        let b = build_bmodel(&w, &SymmetryGroup::trivial(2)).unwrap();
        let r = MilnorRing::new(&w).unwrap();
        assert_eq!(b.dim(), r.mu());
        for i in 0..r.mu() {
            for j in 0..r.mu() {
                assert_eq!(b.product(i, j), r.product(i, j));
            }
        }
    }

    #[test]
    fn quartic_sl() {
        let b = model("x^4 + y^4", &[&[(1, 4), (3, 4)]]);
        assert_eq!(b.dim(), 6);
        assert!(verify_bmodel_axioms(&b).passed());
    }

    #[test]
    fn quadric_pair() {
        let b = model("z^2 + w^2", &[&[(1, 2), (1, 2)]]);
        assert_eq!(b.dim(), 2);
        assert!(verify_bmodel_axioms(&b).passed());
    }

    #[test]
    fn not_sl_rejected() {
        let w = p("x^2 + y^6");
        let g = subgroup_generated(&w, &[vec![rat(0, 1), rat(1, 3)]]).unwrap();
        assert!(matches!(build_bmodel(&w, &g), Err(Error::NotInSl(_))));
    }

    #[test]
    fn restriction() {
        let w = p("x^2*y + y^3");
        assert_eq!(restrict_polynomial(&w, &[1]).to_string(), "y^3");
        assert_eq!(restrict_polynomial(&p("x^2 + y^6"), &[]).nvars(), 0);
    }

    #[test]
    fn mutations_break_axioms() {
        let w = p("x^2 + y^6");
        let g = subgroup_generated(&w, &[vec![rat(1, 2), rat(1, 2)]]).unwrap();
        for m in [Mutation::DropMuRatio, Mutation::RestrictionAtOne] {
            let opts = BModelOptions { mutation: m, ..Default::default() };
            let b = build_bmodel_with(&w, &g, opts).unwrap();
            let r = verify_bmodel_axioms(&b);
            assert!(!r.passed(), "{m:?} should break an axiom");
        }
    }
}
