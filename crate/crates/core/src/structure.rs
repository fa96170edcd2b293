//! Quasihomogeneous weights, admissibility, and the atomic decomposition of
//! invertible polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::rational::fmt_rat;
use crate::kernel::{buchberger, Monomial, MonomialOrder, Polynomial, Rational, Scalar, StandardMonomials};
use crate::linalg;

/// Rows are monomials (in the polynomial's canonical term order), columns variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    pub rows: Vec<Vec<u32>>,
    pub nvars: usize,
}

impl ExponentMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn to_bigint(&self) -> Vec<Vec<BigInt>> {
        self.rows.iter().map(|r| r.iter().map(|&e| BigInt::from(e)).collect()).collect()
    }

    /// Exact rank over Q.
    pub fn rank(&self) -> usize {
        linalg::smith_normal_form(&self.to_bigint()).rank
    }

    /// |det A| for square matrices.
    pub fn abs_determinant(&self) -> Option<BigInt> {
        if self.nrows() != self.nvars {
            return None;
        }
        let m: Vec<Vec<Scalar>> =
            self.rows.iter().map(|r| r.iter().map(|&e| Scalar::from_int(e as i64)).collect()).collect();
        let d = linalg::determinant(&m).to_rational()?;
        Some(d.numer().abs())
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        f.write_str("]")
    }
}

pub fn exponent_matrix(w: &Polynomial) -> ExponentMatrix {
    ExponentMatrix { rows: w.terms().map(|(m, _)| m.exps().to_vec()).collect(), nvars: w.nvars() }
}

/// Quasihomogeneous weights `q` with `A q = 1`, each in (0,1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    pub q: Vec<Rational>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// The exponential grading element `J = (q_1, …, q_n)` as a phase vector.
    pub fn j_phase(&self) -> Vec<Rational> {
        self.q.clone()
    }

    /// Weights sorted ascending, for multiset comparison.
    pub fn sorted(&self) -> Vec<Rational> {
        let mut v = self.q.clone();
        v.sort();
        v
    }

    /// Central charge `Σ (1 - 2 q_i)`.
    pub fn central_charge(&self) -> Rational {
        self.q.iter().map(|q| Rational::one() - q * Rational::from_integer(2.into())).sum()
    }

    /// `∏ (1/q_i - 1)`, the Milnor number predicted by the weights.
    pub fn milnor_number(&self) -> Rational {
        self.q.iter().map(|q| q.recip() - Rational::one()).product()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.q.iter().map(fmt_rat).collect();
        write!(f, "({})", cells.join(", "))
    }
}

/// Solves `A q = 1` exactly. Rank deficiency is an error: weights must be unique.
pub fn compute_weights(w: &Polynomial) -> Result<WeightVector> {
    if w.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let a = exponent_matrix(w);
    let n = w.nvars();
    let m: Vec<Vec<Scalar>> = a.rows.iter().map(|r| r.iter().map(|&e| Scalar::from_int(e as i64)).collect()).collect();
    let ones = vec![Scalar::one(); a.nrows()];
    let sol = linalg::solve(&m, &ones).ok_or(Error::NotQuasihomogeneous)?;
    let rank = linalg::rank(&m);
    if rank < n {
        return Err(Error::NonUniqueWeights { rank, nvars: n });
    }
    let q: Vec<Rational> = sol.iter().map(|s| s.to_rational().expect("rational system")).collect();
    for (i, qi) in q.iter().enumerate() {
        if !qi.is_positive() || *qi >= Rational::one() {
            return Err(Error::WeightOutOfRange { var: w.vars().names()[i].clone(), weight: fmt_rat(qi) });
        }
    }
    Ok(WeightVector { q })
}

/// True iff the Jacobian quotient is finite dimensional and `W` has no
/// constant or linear part.
pub fn is_nondegenerate(w: &Polynomial) -> bool {
    if w.is_zero() || !w.has_no_low_terms() {
        return false;
    }
    if w.nvars() == 0 {
        return true;
    }
    jacobian_standard_monomials(w, &MonomialOrder::grevlex(w.nvars())) != StandardMonomials::Infinite
}

pub(crate) fn jacobian(w: &Polynomial) -> Vec<Polynomial> {
    (0..w.nvars()).map(|i| w.partial_derivative(i)).collect()
}

fn jacobian_standard_monomials(w: &Polynomial, order: &MonomialOrder) -> StandardMonomials {
    buchberger(&jacobian(w), order).standard_monomials()
}

/// Which clause of admissibility failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityFailure {
    Zero,
    LowOrderTerms,
    CrossTerm(String),
    Degenerate,
    NotQuasihomogeneous,
    NonUniqueWeights,
    WeightOutOfRange(String),
}

impl fmt::Display for AdmissibilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibilityFailure::Zero => f.write_str("zero polynomial"),
            AdmissibilityFailure::LowOrderTerms => f.write_str("constant or linear terms present"),
            AdmissibilityFailure::CrossTerm(m) => write!(f, "cross-term monomial {m}"),
            AdmissibilityFailure::Degenerate => f.write_str("degenerate: critical point at 0 is not isolated"),
            AdmissibilityFailure::NotQuasihomogeneous => f.write_str("not quasihomogeneous"),
            AdmissibilityFailure::NonUniqueWeights => f.write_str("weights are not unique"),
            AdmissibilityFailure::WeightOutOfRange(s) => write!(f, "weight out of range: {s}"),
        }
    }
}

impl AdmissibilityFailure {
    pub fn clause(&self) -> &'static str {
        match self {
            AdmissibilityFailure::Zero => "zero",
            AdmissibilityFailure::LowOrderTerms => "low-order-terms",
            AdmissibilityFailure::CrossTerm(_) => "cross-term",
            AdmissibilityFailure::Degenerate => "nondegeneracy",
            AdmissibilityFailure::NotQuasihomogeneous => "quasihomogeneity",
            AdmissibilityFailure::NonUniqueWeights => "unique-weights",
            AdmissibilityFailure::WeightOutOfRange(_) => "weight-range",
        }
    }
}

/// Checks the admissibility clauses in a fixed order and reports the first failure.
pub fn is_admissible(w: &Polynomial) -> std::result::Result<WeightVector, AdmissibilityFailure> {
    if w.is_zero() {
        return Err(AdmissibilityFailure::Zero);
    }
    if !w.has_no_low_terms() {
        return Err(AdmissibilityFailure::LowOrderTerms);
    }
    let names = w.vars().names();
    if let Some((m, _)) = w.terms().find(|(m, _)| m.total_degree() == 2 && m.support().count() == 2) {
        return Err(AdmissibilityFailure::CrossTerm(m.display(names).to_string()));
    }
    if !is_nondegenerate(w) {
        return Err(AdmissibilityFailure::Degenerate);
    }
    match compute_weights(w) {
        Ok(q) => Ok(q),
        Err(Error::NotQuasihomogeneous) => Err(AdmissibilityFailure::NotQuasihomogeneous),
        Err(Error::NonUniqueWeights { .. }) => Err(AdmissibilityFailure::NonUniqueWeights),
        Err(Error::WeightOutOfRange { var, weight }) => {
            Err(AdmissibilityFailure::WeightOutOfRange(format!("{var} = {weight}")))
        }
        Err(e) => unreachable!("unexpected weight error {e}"),
    }
}

pub(crate) fn require_admissible(w: &Polynomial) -> Result<WeightVector> {
    is_admissible(w).map_err(|f| Error::Inadmissible(format!("{w}: {f}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomicKind {
    Fermat,
    Loop,
    Chain,
    NoninvertibleBlock,
}

impl fmt::Display for AtomicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomicKind::Fermat => "fermat",
            AtomicKind::Loop => "loop",
            AtomicKind::Chain => "chain",
            AtomicKind::NoninvertibleBlock => "noninvertible-block",
        })
    }
}

/// One summand of the decomposition into disjoint-variable pieces.
#[derive(Clone, Debug)]
pub struct Block {
    /// Ambient variable indices. For loops and chains these are in canonical
    /// order: chains run `x_1^a1 x_2 + … + x_N^aN`, loops start at the smallest index.
    pub vars: Vec<usize>,
    pub summand: Polynomial,
    pub kind: AtomicKind,
    /// Exponents `a_i` of the atomic shape, aligned with `vars` (empty for noninvertible blocks).
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub invertible: bool,
    pub blocks: Vec<Block>,
}

/// Connected components of the graph joining variables that share a monomial,
/// each sorted, ordered by smallest member.
pub fn variable_blocks(w: &Polynomial) -> Vec<Vec<usize>> {
    let n = w.nvars();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for m in w.monomials() {
        let s: Vec<usize> = m.support().collect();
        for pair in s.windows(2) {
            let (a, b) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match blocks.iter_mut().find(|b| roots[b[0]] == roots[i]) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    blocks
}

/// Sum of the terms of `w` supported on `vars`, kept in the ambient variables.
pub fn block_summand(w: &Polynomial, vars: &[usize]) -> Polynomial {
    Polynomial::from_terms(
        w.vars(),
        w.field(),
        w.terms().filter(|(m, _)| m.support().all(|i| vars.contains(&i))).map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Recognizes the fermat/loop/chain shape of an invertible block.
fn atomic_shape(block: &[usize], monomials: &[Monomial]) -> Option<(AtomicKind, Vec<usize>, Vec<u32>)> {
    if block.len() != monomials.len() {
        return None;
    }
    // owner: variable with exponent >= 2; successor: the other variable, with exponent 1
    let mut owner_of: Vec<Option<(u32, Option<usize>)>> = vec![None; block.len()];
    for m in monomials {
        let s: Vec<usize> = m.support().collect();
        let (owner, exp, succ) = match s.as_slice() {
            [i] if m.exp(*i) >= 2 => (*i, m.exp(*i), None),
            [i, j] if m.exp(*i) >= 2 && m.exp(*j) == 1 => (*i, m.exp(*i), Some(*j)),
            [i, j] if m.exp(*j) >= 2 && m.exp(*i) == 1 => (*j, m.exp(*j), Some(*i)),
            _ => return None,
        };
        let k = block.iter().position(|&b| b == owner)?;
        if owner_of[k].is_some() {
            return None;
        }
        owner_of[k] = Some((exp, succ));
    }
    let info: Vec<(u32, Option<usize>)> = owner_of.into_iter().collect::<Option<_>>()?;
    let pos = |v: usize| block.iter().position(|&b| b == v);
    if block.len() == 1 {
        return match info[0] {
            (a, None) => Some((AtomicKind::Fermat, block.to_vec(), vec![a])),
            _ => None,
        };
    }
    let terminals: Vec<usize> = (0..block.len()).filter(|&k| info[k].1.is_none()).collect();
    let mut indegree = vec![0usize; block.len()];
    for (_, s) in &info {
        if let Some(s) = s {
            indegree[pos(*s)?] += 1;
        }
    }
    match terminals.as_slice() {
        [] => {
            // loop: successor map must be one cycle through all variables
            let mut order = vec![0usize];
            let mut cur = 0;
            loop {
                let next = pos(info[cur].1?)?;
                if next == 0 {
                    break;
                }
                if order.contains(&next) {
                    return None;
                }
                order.push(next);
                cur = next;
            }
            if order.len() != block.len() {
                return None;
            }
            Some((
                AtomicKind::Loop,
                order.iter().map(|&k| block[k]).collect(),
                order.iter().map(|&k| info[k].0).collect(),
            ))
        }
        [_] => {
            // chain: a single path starting at the variable with no predecessor
            let start = (0..block.len()).find(|&k| indegree[k] == 0)?;
            if indegree.iter().any(|&d| d > 1) {
                return None;
            }
            let mut order = vec![start];
            let mut cur = start;
            while let Some(s) = info[cur].1 {
                cur = pos(s)?;
                order.push(cur);
            }
            if order.len() != block.len() {
                return None;
            }
            Some((
                AtomicKind::Chain,
                order.iter().map(|&k| block[k]).collect(),
                order.iter().map(|&k| info[k].0).collect(),
            ))
        }
        _ => None,
    }
}

/// Splits `w` into disjoint-variable blocks and labels invertible ones by shape.
pub fn classify(w: &Polynomial) -> Result<Classification> {
    require_admissible(w)?;
    let invertible = w.num_terms() == w.nvars();
    let mut blocks = Vec::new();
    for vars in variable_blocks(w) {
        let summand = block_summand(w, &vars);
        if invertible {
            let monomials: Vec<Monomial> = summand.monomials().cloned().collect();
            let (kind, order, exponents) =
                atomic_shape(&vars, &monomials).ok_or_else(|| Error::UnrecognizedAtomic(summand.to_string()))?;
            blocks.push(Block { vars: order, summand, kind, exponents });
        } else {
            blocks.push(Block { vars, summand, kind: AtomicKind::NoninvertibleBlock, exponents: Vec::new() });
        }
    }
    Ok(Classification { invertible, blocks })
}

/// Multiset equality of the weights of two quasihomogeneous polynomials.
pub fn check_same_weights(w1: &Polynomial, w2: &Polynomial) -> Result<bool> {
    let (a, b) = (compute_weights(w1)?, compute_weights(w2)?);
    Ok(a.sorted() == b.sorted())
}

/// Result of testing whether the Milnor ring has an element of weighted degree 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebbVerdict {
    pub applicable: bool,
    /// A standard monomial of weighted degree exactly 1, when one exists.
    pub witness: Option<Monomial>,
}

pub fn webb_applicable(w: &Polynomial) -> Result<WebbVerdict> {
    let q = require_admissible(w)?;
    let sm = jacobian_standard_monomials(w, &MonomialOrder::weighted(q.q.clone()))
        .finite()
        .ok_or_else(|| Error::Degenerate(w.to_string()))?;
    let witness = sm.into_iter().find(|m| m.weighted_degree(&q.q) == Rational::one());
    Ok(WebbVerdict { applicable: witness.is_none(), witness })
}

/// `Π(1/q_i - 1)` as an integer, when it is one.
pub fn predicted_milnor_number(q: &WeightVector) -> Option<usize> {
    let mu = q.milnor_number();
    if !mu.is_integer() || mu.is_negative() || mu.is_zero() {
        return None;
    }
    mu.to_integer().try_into().ok()
}
