//! Finite-dimensional graded Frobenius algebras given by structure constants,
//! and exhaustive verification of their axioms.

use std::collections::BTreeMap;
use std::fmt;

use crate::exec::Exec;
use crate::kernel::rational::fmt_rat;
use crate::kernel::{Rational, Scalar};
use crate::linalg;
use crate::symmetry::GroupElement;

/// Sparse coordinate vector over a basis, sorted by index, no zero entries.
pub type SparseVec = Vec<(usize, Scalar)>;

pub fn basis_vector(i: usize) -> SparseVec {
    vec![(i, Scalar::one())]
}

/// Collects `(index, coefficient)` pairs, summing repeats and dropping zeros.
pub fn collect_sparse(items: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (i, c) in items {
        if c.is_zero() {
            continue;
        }
        match acc.get_mut(&i) {
            Some(x) => *x = &*x + &c,
            None => {
                acc.insert(i, c);
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

pub fn scale_sparse(v: &SparseVec, c: &Scalar) -> SparseVec {
    collect_sparse(v.iter().map(|(i, x)| (*i, x * c)))
}

pub fn sparse_eq(a: &SparseVec, b: &SparseVec) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && x.1 == y.1)
}

/// A graded algebra with unit, bilinear pairing and a basis indexed `0..dim`.
///
/// Degrees use the doubled convention (a monomial of weighted degree p has degree 2p).
pub trait FrobeniusAlgebra: Send + Sync {
    fn dim(&self) -> usize;
    fn label(&self, i: usize) -> String;
    fn degree(&self, i: usize) -> &Rational;
    fn top_degree(&self) -> Rational;
    /// Index of the basis element equal to the unit.
    fn unit(&self) -> usize;
    fn product(&self, i: usize, j: usize) -> &SparseVec;
    fn pairing(&self, i: usize, j: usize) -> &Scalar;
    /// Image of the Hessian in the top degree, when the algebra has one.
    fn hessian_element(&self) -> Option<SparseVec>;
    /// Phase of a diagonal group element on basis element `i`.
    fn phase(&self, g: &GroupElement, i: usize) -> Rational;
    /// Problems found while assembling structure constants.
    fn closure_violations(&self) -> &[String] {
        &[]
    }

    fn multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let xy = x * y;
                out.extend(self.product(*i, *j).iter().map(|(k, z)| (*k, &xy * z)));
            }
        }
        collect_sparse(out)
    }

    fn pair(&self, a: &SparseVec, b: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, x) in a {
            for (j, y) in b {
                let p = self.pairing(*i, *j);
                if !p.is_zero() {
                    acc = &acc + &(&(x * y) * p);
                }
            }
        }
        acc
    }

    fn pairing_matrix(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.pairing(i, j).clone()).collect()).collect()
    }

    fn format_vec(&self, v: &SparseVec) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = v
            .iter()
            .map(|(i, c)| if c.is_one() { self.label(*i) } else { format!("({c})*{}", self.label(*i)) })
            .collect();
        parts.join(" + ")
    }
}

/// Outcome of one exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Number of instances examined.
    pub checked: usize,
    /// Up to [`MAX_WITNESSES`] failing instances.
    pub witnesses: Vec<String>,
}

pub const MAX_WITNESSES: usize = 5;

impl Check {
    pub fn from_failures(name: &'static str, checked: usize, failures: Vec<String>) -> Check {
        let passed = failures.is_empty();
        let witnesses = failures.into_iter().take(MAX_WITNESSES).collect();
        Check { name, passed, checked, witnesses }
    }

    pub fn single(name: &'static str, ok: bool, witness: impl FnOnce() -> String) -> Check {
        Check { name, passed: ok, checked: 1, witnesses: if ok { Vec::new() } else { vec![witness()] } }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<22} {} ({} checked)", self.name, if self.passed { "pass" } else { "FAIL" }, self.checked)?;
        for w in &self.witnesses {
            write!(f, "\n    witness: {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<Check>,
}

impl AxiomReport {
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

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.checks.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn flatten(v: Vec<Vec<String>>) -> Vec<String> {
    v.into_iter().flatten().collect()
}

/// Exhaustively checks the graded Frobenius algebra axioms on basis elements.
pub fn verify_axioms(a: &dyn FrobeniusAlgebra, exec: Exec) -> AxiomReport {
    let n = a.dim();
    let top = a.top_degree();
    let mut checks = Vec::new();

    checks.push(Check::from_failures("closure", 1, a.closure_violations().to_vec()));

    let u = a.unit();
    let identity: Vec<String> = (0..n)
        .filter(|&i| !sparse_eq(a.product(u, i), &basis_vector(i)) || !sparse_eq(a.product(i, u), &basis_vector(i)))
        .map(|i| format!("1 * {} = {}", a.label(i), a.format_vec(a.product(u, i))))
        .collect();
    checks.push(Check::from_failures("identity", n, identity));

    let comm = flatten(exec.map_range(n, |i| {
        (i + 1..n)
            .filter(|&j| !sparse_eq(a.product(i, j), a.product(j, i)))
            .map(|j| format!("{} * {} != {} * {}", a.label(i), a.label(j), a.label(j), a.label(i)))
            .collect()
    }));
    checks.push(Check::from_failures("commutativity", n * n.saturating_sub(1) / 2, comm));

    let assoc = flatten(exec.map_range(n, |i| {
        let mut bad = Vec::new();
        for j in 0..n {
            let ij = a.product(i, j);
            for k in 0..n {
                let left = a.multiply(ij, &basis_vector(k));
                let right = a.multiply(&basis_vector(i), a.product(j, k));
                if !sparse_eq(&left, &right) {
                    bad.push(format!(
                        "({a} * {b}) * {c} = {l} but {a} * ({b} * {c}) = {r}",
                        a = a.label(i),
                        b = a.label(j),
                        c = a.label(k),
                        l = a.format_vec(&left),
                        r = a.format_vec(&right)
                    ));
                }
            }
        }
        bad
    }));
    checks.push(Check::from_failures("associativity", n * n * n, assoc));

    let degrees = flatten(exec.map_range(n, |i| {
        let mut bad = Vec::new();
        for j in i..n {
            let expect = a.degree(i) + a.degree(j);
            for (k, _) in a.product(i, j) {
                if *a.degree(*k) != expect {
                    bad.push(format!(
                        "{} * {} has component {} of degree {} (expected {})",
                        a.label(i),
                        a.label(j),
                        a.label(*k),
                        fmt_rat(a.degree(*k)),
                        fmt_rat(&expect)
                    ));
                }
            }
        }
        bad
    }));
    checks.push(Check::from_failures("degree-additivity", n * (n + 1) / 2, degrees));

    let bounds: Vec<String> = (0..n)
        .filter(|&i| a.degree(i) < &Rational::from_integer(0.into()) || a.degree(i) > &top)
        .map(|i| format!("{} has degree {} outside [0, {}]", a.label(i), fmt_rat(a.degree(i)), fmt_rat(&top)))
        .collect();
    checks.push(Check::from_failures("degree-bounds", n, bounds));

    let mut sym = Vec::new();
    let mut graded = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if j > i && a.pairing(i, j) != a.pairing(j, i) {
                sym.push(format!("<{}, {}>", a.label(i), a.label(j)));
            }
            if !a.pairing(i, j).is_zero() && a.degree(i) + a.degree(j) != top {
                graded.push(format!("<{}, {}> = {} off the top degree", a.label(i), a.label(j), a.pairing(i, j)));
            }
        }
    }
    checks.push(Check::from_failures("pairing-symmetry", n * n, sym));
    checks.push(Check::from_failures("pairing-grading", n * n, graded));

    let det = linalg::determinant(&a.pairing_matrix());
    checks.push(Check::single("pairing-nondegenerate", !det.is_zero(), || "pairing matrix is singular".into()));

    let frob = flatten(exec.map_range(n, |i| {
        let mut bad = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let left = a.pair(a.product(i, j), &basis_vector(k));
                let right = a.pair(&basis_vector(i), a.product(j, k));
                if left != right {
                    bad.push(format!(
                        "<{a} * {b}, {c}> = {left} but <{a}, {b} * {c}> = {right}",
                        a = a.label(i),
                        b = a.label(j),
                        c = a.label(k)
                    ));
                }
            }
        }
        bad
    }));
    checks.push(Check::from_failures("frobenius", n * n * n, frob));

    AxiomReport { checks }
}
