//! Diagonal symmetry groups written additively as phase vectors in (Q/Z)^n.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::rational::{fmt_rat, frac};
use crate::kernel::{Monomial, Polynomial, Rational};
use crate::linalg;
use crate::structure::{exponent_matrix, variable_blocks, ExponentMatrix};

/// Diagonal group element `(e^{2πi g_1}, …, e^{2πi g_n})` stored by its phases in [0,1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(Vec<Rational>);

impl GroupElement {
    pub fn new(phases: impl IntoIterator<Item = Rational>) -> Self {
        GroupElement(phases.into_iter().map(|q| frac(&q)).collect())
    }

    pub fn identity(n: usize) -> Self {
        GroupElement(vec![Rational::zero(); n])
    }

    pub fn phases(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|q| q.is_zero())
    }

    pub fn add(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.len(), other.len());
        GroupElement::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b))
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement::new(self.0.iter().map(|a| -a))
    }

    /// Full determinant phase `Σ g_i mod Z`.
    pub fn det_phase(&self) -> Rational {
        frac(&self.0.iter().sum())
    }

    pub fn in_sl(&self) -> bool {
        self.det_phase().is_zero()
    }

    /// Indices with phase 0: the coordinates of the fixed-point subspace.
    pub fn fixed_locus(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_zero()).collect()
    }

    /// Restriction to the coordinates `indices`.
    pub fn project(&self, indices: &[usize]) -> GroupElement {
        GroupElement(indices.iter().map(|&i| self.0[i].clone()).collect())
    }

    /// Keeps the phases on `indices`, zeroing the rest.
    pub fn mask(&self, indices: &[usize]) -> GroupElement {
        GroupElement(
            (0..self.len()).map(|i| if indices.contains(&i) { self.0[i].clone() } else { Rational::zero() }).collect(),
        )
    }

    /// Order of the element in (Q/Z)^n.
    pub fn order(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()))
    }

    /// `Σ a_i g_i mod Z` for the exponent vector of `m`.
    pub fn monomial_phase(&self, m: &Monomial) -> Rational {
        frac(&m.exps().iter().zip(&self.0).map(|(&a, g)| g * Rational::from_integer(a.into())).sum())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "({})", cells.join(","))
    }
}

/// Which determinant enters the action on sector monomials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DetConvention {
    /// The full determinant `Σ g_i` over all coordinates.
    #[default]
    Full,
    /// Only the coordinates of the sector's fixed locus contribute.
    RestrictedToLocus,
}

/// Phase θ with `g*(m) = e^{2πiθ} m`, using the full determinant.
pub fn act_on_monomial(g: &GroupElement, m: &Monomial) -> Rational {
    frac(&(g.det_phase() + g.monomial_phase(m)))
}

/// Phase of `g` on a monomial of the sector ring over `locus`
/// (`m` is expressed in the locus variables).
pub fn sector_phase(g: &GroupElement, m: &Monomial, locus: &[usize], det: DetConvention) -> Rational {
    let local = g.project(locus);
    let det_phase = match det {
        DetConvention::Full => g.det_phase(),
        DetConvention::RestrictedToLocus => local.det_phase(),
    };
    frac(&(det_phase + local.monomial_phase(m)))
}

/// A finite subgroup of (Q/Z)^n with its full enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    nvars: usize,
    generators: Vec<GroupElement>,
    /// Sorted, identity first.
    elements: Vec<GroupElement>,
}

impl SymmetryGroup {
    /// Closure of `generators` under addition.
    pub fn generated_by(nvars: usize, generators: Vec<GroupElement>) -> SymmetryGroup {
        let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
        let id = GroupElement::identity(nvars);
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = x.add(g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        SymmetryGroup { nvars, generators, elements: seen.into_iter().collect() }
    }

    pub fn trivial(nvars: usize) -> SymmetryGroup {
        SymmetryGroup::generated_by(nvars, Vec::new())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &SymmetryGroup) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    pub fn in_sl(&self) -> bool {
        self.generators.iter().all(|g| g.in_sl())
    }

    /// Projection of every element onto `indices` (zero elsewhere).
    pub fn masked(&self, indices: &[usize]) -> SymmetryGroup {
        SymmetryGroup::generated_by(self.nvars, self.generators.iter().map(|g| g.mask(indices)).collect())
    }
}

/// First monomial row of `a` on which `g` has a nonintegral phase.
fn violation(a: &ExponentMatrix, g: &GroupElement) -> Option<(usize, Rational)> {
    a.rows.iter().enumerate().find_map(|(k, row)| {
        let s = g.monomial_phase(&Monomial::new(row.iter().copied()));
        (!s.is_zero()).then_some((k, s))
    })
}

/// Checks that `g` preserves `w`, naming the monomial that breaks it otherwise.
pub fn check_symmetry(w: &Polynomial, g: &GroupElement) -> Result<()> {
    if g.len() != w.nvars() {
        return Err(Error::PhaseLength { got: g.len(), expected: w.nvars() });
    }
    let a = exponent_matrix(w);
    match violation(&a, g) {
        None => Ok(()),
        Some((k, phase)) => Err(Error::NotASymmetry {
            element: g.to_string(),
            monomial: Monomial::new(a.rows[k].iter().copied()).display(w.vars().names()).to_string(),
            phase: fmt_rat(&phase),
        }),
    }
}

/// `G_W^max = {g : A g ∈ Z^m}` via the Smith form `U A V = D`: the group is
/// generated by the columns `V e_i / d_i`.
pub fn max_symmetry_group(w: &Polynomial) -> Result<SymmetryGroup> {
    let a = exponent_matrix(w);
    let n = w.nvars();
    let snf = linalg::smith_normal_form(&a.to_bigint());
    if snf.rank < n {
        return Err(Error::InfiniteGroup { rank: snf.rank, nvars: n });
    }
    let mut gens = Vec::new();
    for i in 0..n {
        let d = &snf.d[i];
        if d.is_one() {
            continue;
        }
        gens.push(GroupElement::new((0..n).map(|r| Rational::new(snf.v[r][i].clone(), d.clone()))));
    }
    let g = SymmetryGroup::generated_by(n, gens);
    debug_assert!(g.elements.iter().all(|x| violation(&a, x).is_none()));
    Ok(g)
}

pub fn sl_subgroup(g: &SymmetryGroup) -> SymmetryGroup {
    let elems: Vec<GroupElement> = g.elements.iter().filter(|x| x.in_sl()).cloned().collect();
    // a small generating set: greedily add elements not yet generated
    let mut gens: Vec<GroupElement> = Vec::new();
    let mut current = SymmetryGroup::trivial(g.nvars);
    for x in &elems {
        if !current.contains(x) {
            gens.push(x.clone());
            current = SymmetryGroup::generated_by(g.nvars, gens.clone());
        }
    }
    current
}

/// Subgroup generated by phase vectors, each validated against `w`.
pub fn subgroup_generated(w: &Polynomial, gens: &[Vec<Rational>]) -> Result<SymmetryGroup> {
    let mut elems = Vec::new();
    for v in gens {
        let g = GroupElement::new(v.iter().cloned());
        check_symmetry(w, &g)?;
        elems.push(g);
    }
    Ok(SymmetryGroup::generated_by(w.nvars(), elems))
}

/// Monomials of the sector ring over `locus` that every generator fixes.
pub fn invariant_monomials_in_sector(
    basis: &[Monomial],
    group: &SymmetryGroup,
    locus: &[usize],
    det: DetConvention,
) -> Vec<Monomial> {
    basis
        .iter()
        .filter(|m| group.generators().iter().all(|g| sector_phase(g, m, locus, det).is_zero()))
        .cloned()
        .collect()
}

/// Invariant monomials of an untwisted basis (ambient variables).
pub fn invariant_monomials(basis: &[Monomial], group: &SymmetryGroup) -> Vec<Monomial> {
    let all: Vec<usize> = (0..group.nvars()).collect();
    invariant_monomials_in_sector(basis, group, &all, DetConvention::Full)
}

/// Which part of the well-behavedness test failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WellBehavedFailure {
    /// The projection of `element` onto `block` is not in the group.
    ProjectionMissing { element: GroupElement, block: Vec<usize> },
    /// The block projections do not form a direct sum equal to the group.
    NotDirectSum { product_order: usize, order: usize },
    /// `element` fixes some but not all variables of `block`.
    MixedFixing { element: GroupElement, block: Vec<usize> },
}

impl fmt::Display for WellBehavedFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WellBehavedFailure::ProjectionMissing { element, block } => {
                write!(f, "projection of {element} onto block {block:?} is not in G")
            }
            WellBehavedFailure::NotDirectSum { product_order, order } => {
                write!(f, "block factors have product order {product_order} but |G| = {order}")
            }
            WellBehavedFailure::MixedFixing { element, block } => {
                write!(f, "{element} fixes some but not all variables of block {block:?}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct WellBehavedCertificate {
    /// The decomposition that was certified (or the finest one on failure).
    pub blocks: Vec<Vec<usize>>,
    /// Block-supported factors `G_i`.
    pub factors: Vec<SymmetryGroup>,
    pub verdict: bool,
    pub failure: Option<WellBehavedFailure>,
}

fn check_partition(
    group: &SymmetryGroup,
    blocks: &[Vec<usize>],
) -> std::result::Result<Vec<SymmetryGroup>, WellBehavedFailure> {
    for g in group.elements() {
        for b in blocks {
            if !group.contains(&g.mask(b)) {
                return Err(WellBehavedFailure::ProjectionMissing { element: g.clone(), block: b.clone() });
            }
        }
    }
    let factors: Vec<SymmetryGroup> = blocks.iter().map(|b| group.masked(b)).collect();
    let product_order: usize = factors.iter().map(|f| f.order()).product();
    if product_order != group.order() {
        return Err(WellBehavedFailure::NotDirectSum { product_order, order: group.order() });
    }
    for g in group.elements() {
        for b in blocks {
            let fixed = b.iter().filter(|&&i| g.phases()[i].is_zero()).count();
            if fixed != 0 && fixed != b.len() {
                return Err(WellBehavedFailure::MixedFixing { element: g.clone(), block: b.clone() });
            }
        }
    }
    Ok(factors)
}

/// All set partitions of `0..k`, finest first.
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..k {
        let mut next = Vec::new();
        for p in &out {
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
            for j in 0..p.len() {
                let mut q = p.clone();
                q[j].push(i);
                next.push(q);
            }
        }
        out = next;
    }
    out.sort_by_key(|p| std::cmp::Reverse(p.len()));
    out
}

/// Tests the well-behaved condition on the finest disjoint-variable
/// decomposition, falling back to coarser merges of its blocks.
pub fn is_well_behaved(w: &Polynomial, group: &SymmetryGroup) -> WellBehavedCertificate {
    let finest = variable_blocks(w);
    let mut first_failure = None;
    for partition in set_partitions(finest.len()) {
        let blocks: Vec<Vec<usize>> = partition
            .iter()
            .map(|part| {
                let mut b: Vec<usize> = part.iter().flat_map(|&k| finest[k].iter().copied()).collect();
                b.sort();
                b
            })
            .collect();
        match check_partition(group, &blocks) {
            Ok(factors) => return WellBehavedCertificate { blocks, factors, verdict: true, failure: None },
            Err(f) => {
                first_failure.get_or_insert(f);
            }
        }
    }
    WellBehavedCertificate { blocks: finest, factors: Vec::new(), verdict: false, failure: first_failure }
}

/// `J = (q_1, …, q_n)` lies in `G_W^max` (always true for quasihomogeneous W).
pub fn exponential_grading_element(weights: &[Rational]) -> GroupElement {
    GroupElement::new(weights.iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_polynomial, rat};

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, None).unwrap()
    }

    fn ge(v: &[(i64, i64)]) -> GroupElement {
        GroupElement::new(v.iter().map(|&(a, b)| rat(a, b)))
    }

    #[test]
    fn max_groups() {
        let g = max_symmetry_group(&p("x^4 + y^4")).unwrap();
        assert_eq!(g.order(), 16);
        let g = max_symmetry_group(&p("x^3*y + x*y^3")).unwrap();
        assert_eq!(g.order(), 8);
        let g = max_symmetry_group(&p("x^2 + y^6")).unwrap();
        assert_eq!(g.order(), 12);
        assert!(g.contains(&ge(&[(1, 2), (0, 1)])));
        assert!(g.contains(&ge(&[(0, 1), (1, 6)])));
    }

    #[test]
    fn sl_groups() {
        let g = sl_subgroup(&max_symmetry_group(&p("x^4 + y^4")).unwrap());
        assert_eq!(g.order(), 4);
        assert!(g.contains(&ge(&[(1, 4), (3, 4)])));
        assert!(sl_subgroup(&max_symmetry_group(&p("x^3")).unwrap()).is_trivial());
        assert!(ge(&[(1, 2), (1, 2)]).in_sl());
    }

    #[test]
    fn generated_subgroups() {
        let w = p("x^2 + y^6");
        assert_eq!(subgroup_generated(&w, &[vec![rat(1, 2), rat(1, 2)]]).unwrap().order(), 2);
        assert!(subgroup_generated(&w, &[]).unwrap().is_trivial());
        let w4 = p("x^2 + y^6 + z^2 + w^2");
        let g = subgroup_generated(
            &w4,
            &[vec![rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1), rat(1, 2), rat(1, 2)]],
        )
        .unwrap();
        assert_eq!(g.order(), 4);
        let err = subgroup_generated(&w, &[vec![rat(1, 3), rat(0, 1)]]).unwrap_err();
        assert!(matches!(err, Error::NotASymmetry { .. }));
    }

    #[test]
    fn fixed_loci() {
        assert_eq!(GroupElement::identity(3).fixed_locus(), vec![0, 1, 2]);
        assert!(ge(&[(1, 2), (1, 2)]).fixed_locus().is_empty());
        assert_eq!(ge(&[(0, 1), (1, 2), (1, 2), (0, 1)]).fixed_locus(), vec![0, 3]);
    }

    #[test]
    fn actions() {
        let g = ge(&[(1, 2), (1, 2)]);
        assert_eq!(act_on_monomial(&g, &Monomial::new([0, 2])), rat(0, 1));
        assert_eq!(act_on_monomial(&g, &Monomial::new([0, 1])), rat(1, 2));
        assert_eq!(act_on_monomial(&GroupElement::identity(2), &Monomial::new([3, 1])), rat(0, 1));
        let basis: Vec<Monomial> = (0..5).map(|k| Monomial::new([0, k])).collect();
        let grp = subgroup_generated(&p("x^2 + y^6"), &[vec![rat(1, 2), rat(1, 2)]]).unwrap();
        assert_eq!(
            invariant_monomials(&basis, &grp),
            vec![Monomial::new([0, 0]), Monomial::new([0, 2]), Monomial::new([0, 4])]
        );
    }

    #[test]
    fn empty_sector_unit() {
        let one = vec![Monomial::one(0)];
        let sl = SymmetryGroup::generated_by(2, vec![ge(&[(1, 2), (1, 2)])]);
        assert_eq!(invariant_monomials_in_sector(&one, &sl, &[], DetConvention::Full), one);
        let not_sl = SymmetryGroup::generated_by(2, vec![ge(&[(1, 2), (0, 1)])]);
        assert!(invariant_monomials_in_sector(&one, &not_sl, &[], DetConvention::Full).is_empty());
    }

    #[test]
    fn well_behaved_examples() {
        let w = p("x^2 + y^6");
        let g = subgroup_generated(&w, &[vec![rat(1, 2), rat(1, 2)]]).unwrap();
        assert!(is_well_behaved(&w, &g).verdict);

        let w = p("x^2*y + y^3");
        let g = subgroup_generated(&w, &[vec![rat(1, 2), rat(0, 1)]]).unwrap();
        let cert = is_well_behaved(&w, &g);
        assert!(!cert.verdict);
        assert!(matches!(cert.failure, Some(WellBehavedFailure::MixedFixing { .. })));

        let w = p("x^2 + y^6 + z^2 + w^2");
        let g = subgroup_generated(&w, &[vec![rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)]]).unwrap();
        let cert = is_well_behaved(&w, &g);
        assert!(cert.verdict);
        assert_eq!(cert.blocks, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(cert.factors[0].order(), 2);
        assert_eq!(cert.factors[1].order(), 1);
    }

    #[test]
    fn partitions_count() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(set_partitions(2)[0].len(), 2);
    }
}
