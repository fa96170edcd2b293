//! The Milnor ring `Q_W = C[x] / (∂W)` with its grading, Hessian and residue pairing.

use std::collections::HashMap;

use crate::algebra::{collect_sparse, verify_axioms, AxiomReport, FrobeniusAlgebra, SparseVec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernel::groebner::buchberger_in;
use crate::kernel::rational::fmt_rat;
use crate::kernel::{GroebnerBasis, Monomial, MonomialOrder, Polynomial, Rational, Scalar, Vars};
use crate::structure::{compute_weights, jacobian, predicted_milnor_number, WeightVector};
use crate::symmetry::{act_on_monomial, GroupElement};

#[derive(Clone, Debug)]
pub struct MilnorRing {
    w: Polynomial,
    weights: WeightVector,
    gb: GroebnerBasis,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    degrees: Vec<Rational>,
    c_hat: Rational,
    hess_coeff: Scalar,
    hess_index: usize,
    table: Vec<Vec<SparseVec>>,
    pairing: Vec<Vec<Scalar>>,
}

impl MilnorRing {
    /// Builds the ring, computing weights from `w`.
    pub fn new(w: &Polynomial) -> Result<MilnorRing> {
        MilnorRing::with_exec(w, Exec::default())
    }

    pub fn with_exec(w: &Polynomial, exec: Exec) -> Result<MilnorRing> {
        let weights = if w.nvars() == 0 { WeightVector { q: Vec::new() } } else { compute_weights(w)? };
        MilnorRing::with_weights(w, weights, exec)
    }

    /// Builds the ring with prescribed weights (used for restrictions, which
    /// inherit the ambient weights).
    pub fn with_weights(w: &Polynomial, weights: WeightVector, exec: Exec) -> Result<MilnorRing> {
        let n = w.nvars();
        assert_eq!(weights.len(), n, "one weight per variable");
        if n > 0 && !w.is_weighted_homogeneous(&weights.q, &Rational::from_integer(1.into())) {
            return Err(Error::NotQuasihomogeneous);
        }
        let order = MonomialOrder::weighted(weights.q.clone());
        let gens = if n == 0 { Vec::new() } else { jacobian(w) };
        let gb = buchberger_in(w.vars(), w.field(), &gens, &order);
        let basis = gb.standard_monomials().finite().ok_or_else(|| Error::Degenerate(w.to_string()))?;
        if gb.is_unit() || basis.is_empty() {
            // W has a linear term: the origin is not a critical point
            return Err(Error::Degenerate(w.to_string()));
        }
        let mu = basis.len();
        if n > 0 && predicted_milnor_number(&weights) != Some(mu) {
            return Err(Error::InvariantViolation(format!(
                "dim Q_W = {mu} but the weights predict {}",
                fmt_rat(&weights.milnor_number())
            )));
        }
        let index: HashMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let two = Rational::from_integer(2.into());
        let degrees: Vec<Rational> = basis.iter().map(|m| m.weighted_degree(&weights.q) * &two).collect();
        let c_hat = weights.central_charge();

        let hess = gb.normal_form(&w.hessian());
        if hess.is_zero() {
            return Err(Error::HessianZero(w.to_string()));
        }
        if hess.num_terms() != 1 {
            return Err(Error::HessianNotMonomial(hess.to_string()));
        }
        let (hess_mono, hess_coeff) = hess.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let hess_index = index[&hess_mono];
        let top = &c_hat * &two;
        let at_top: Vec<usize> = (0..mu).filter(|&i| degrees[i] == top).collect();
        if at_top != vec![hess_index] || degrees.iter().any(|d| d > &top) {
            return Err(Error::InvariantViolation(format!(
                "top degree {} is not spanned by the Hessian monomial alone",
                fmt_rat(&top)
            )));
        }

        let field = w.field().clone();
        let upper: Vec<Vec<SparseVec>> = exec.map_range(mu, |i| {
            (i..mu)
                .map(|j| {
                    let nf = gb.normal_form_monomial(&basis[i].mul(&basis[j]), &Scalar::one_in(&field));
                    collect_sparse(nf.terms().map(|(m, c)| (index[m], c.clone())))
                })
                .collect()
        });
        let table: Vec<Vec<SparseVec>> = (0..mu)
            .map(|i| (0..mu).map(|j| if j >= i { upper[i][j - i].clone() } else { upper[j][i - j].clone() }).collect())
            .collect();
        let mu_scalar = Scalar::from_int(mu as i64);
        let hinv = hess_coeff.inv().expect("Hessian coefficient is a zero divisor");
        let scale = &mu_scalar * &hinv;
        let pairing: Vec<Vec<Scalar>> = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        v.iter().find(|(k, _)| *k == hess_index).map(|(_, c)| c * &scale).unwrap_or_else(Scalar::zero)
                    })
                    .collect()
            })
            .collect();

        Ok(MilnorRing {
            w: w.clone(),
            weights,
            gb,
            basis,
            index,
            degrees,
            c_hat,
            hess_coeff,
            hess_index,
            table,
            pairing,
        })
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.w
    }

    pub fn vars(&self) -> &Vars {
        self.w.vars()
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn mu(&self) -> usize {
        self.basis.len()
    }

    pub fn c_hat(&self) -> &Rational {
        &self.c_hat
    }

    /// Normal form of the Hessian as `coefficient * monomial`.
    pub fn hessian_nf(&self) -> (&Scalar, &Monomial) {
        (&self.hess_coeff, &self.basis[self.hess_index])
    }

    pub fn hessian_index(&self) -> usize {
        self.hess_index
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Doubled degree `2 Σ a_i q_i`.
    pub fn monomial_degree(&self, m: &Monomial) -> Rational {
        m.weighted_degree(&self.weights.q) * Rational::from_integer(2.into())
    }

    /// Weighted degree `Σ a_i q_i`.
    pub fn weighted_degree(&self, m: &Monomial) -> Rational {
        m.weighted_degree(&self.weights.q)
    }

    /// Coordinates of the class of `p` (which must live in the ring's variables).
    pub fn reduce(&self, p: &Polynomial) -> SparseVec {
        assert_eq!(p.vars(), self.vars(), "polynomial over different variables");
        let nf = self.gb.normal_form(p);
        collect_sparse(nf.terms().map(|(m, c)| (self.index[m], c.clone())))
    }

    /// Coordinates of the class of `c * m`.
    pub fn reduce_term(&self, m: &Monomial, c: &Scalar) -> SparseVec {
        let nf = self.gb.normal_form_monomial(m, c);
        collect_sparse(nf.terms().map(|(m, c)| (self.index[m], c.clone())))
    }

    pub fn to_polynomial(&self, v: &SparseVec) -> Polynomial {
        Polynomial::from_terms(self.vars(), self.w.field(), v.iter().map(|(i, c)| (self.basis[*i].clone(), c.clone())))
    }

    /// `⟨a, b⟩` for polynomials `a`, `b`.
    pub fn pairing_of(&self, a: &Polynomial, b: &Polynomial) -> Scalar {
        self.pair(&self.reduce(a), &self.reduce(b))
    }

    pub fn product_table(&self) -> &[Vec<SparseVec>] {
        &self.table
    }

    /// Whether the classes of `monomials` form a basis of the quotient.
    pub fn is_monomial_basis(&self, monomials: &[Monomial]) -> bool {
        if monomials.len() != self.mu() {
            return false;
        }
        let rows: Vec<Vec<Scalar>> = monomials
            .iter()
            .map(|m| {
                let mut row = vec![Scalar::zero(); self.mu()];
                for (i, c) in self.reduce_term(m, &Scalar::one()) {
                    row[i] = c;
                }
                row
            })
            .collect();
        crate::linalg::rank(&rows) == self.mu()
    }
}

impl FrobeniusAlgebra for MilnorRing {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn label(&self, i: usize) -> String {
        self.basis[i].display(self.vars().names()).to_string()
    }

    fn degree(&self, i: usize) -> &Rational {
        &self.degrees[i]
    }

    fn top_degree(&self) -> Rational {
        &self.c_hat * Rational::from_integer(2.into())
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
        Some(vec![(self.hess_index, self.hess_coeff.clone())])
    }

    fn phase(&self, g: &GroupElement, i: usize) -> Rational {
        act_on_monomial(g, &self.basis[i])
    }
}

/// Exhaustive graded Frobenius axiom check for a Milnor ring.
pub fn verify_frobenius(ring: &MilnorRing, exec: Exec) -> AxiomReport {
    verify_axioms(ring, exec)
}

/// Zero polynomial in zero variables: its Milnor ring is one-dimensional.
pub fn empty_polynomial() -> Polynomial {
    Polynomial::zero(&Vars::empty(), &crate::kernel::Field::rationals())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_polynomial, rat};

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, None).unwrap()
    }

    fn ring(s: &str) -> MilnorRing {
        MilnorRing::new(&p(s)).unwrap()
    }

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.iter().copied())
    }

    #[test]
    fn box_basis_of_quartic_pair() {
        let boxed: Vec<Monomial> = (0..3).flat_map(|a| (0..3).map(move |b| Monomial::new([a, b]))).collect();
        for w in ["x^4 + y^4", "x^3*y + x*y^3"] {
            let r = MilnorRing::new(&parse_polynomial(w, Some(&["x", "y"])).unwrap()).unwrap();
            assert!(r.is_monomial_basis(&boxed), "{w}");
            assert!(!r.is_monomial_basis(&boxed[..8]));
        }
    }

    #[test]
    fn fermat_quartic() {
        let r = ring("x^4 + y^4");
        assert_eq!(r.mu(), 9);
        let mut b = r.basis().to_vec();
        b.sort();
        let mut expect: Vec<Monomial> = (0..3).flat_map(|a| (0..3).map(move |c| Monomial::new([a, c]))).collect();
        expect.sort();
        assert_eq!(b, expect);
        assert_eq!(r.c_hat(), &rat(1, 1));
        let (c, mono) = r.hessian_nf();
        assert_eq!(c, &Scalar::from_int(144));
        assert_eq!(mono, &m(&[2, 2]));
        let xy = |s: &str| parse_polynomial(s, Some(&["x", "y"])).unwrap();
        let one = xy("1");
        assert_eq!(r.pairing_of(&one, &xy("x^2*y^2")), Scalar::rational(rat(1, 16)));
        assert_eq!(r.pairing_of(&xy("x"), &xy("x*y^2")), Scalar::rational(rat(1, 16)));
        assert!(r.pairing_of(&one, &one).is_zero());
        assert_eq!(r.monomial_degree(&m(&[2, 2])), rat(2, 1));
        assert!(verify_frobenius(&r, Exec::Sequential).passed());
    }

    #[test]
    fn example_family_bases() {
        for s in ["x^2 + x*y^3 + y^6", "x^2 + y^6", "x^2 + x*y^3"] {
            let r = ring(s);
            assert_eq!(r.basis(), &(0..5).map(|k| m(&[0, k])).collect::<Vec<_>>()[..], "{s}");
        }
        assert_eq!(ring("x^2 + y^6").hessian_nf().0, &Scalar::from_int(60));
        assert_eq!(ring("x^2 + x*y^3").hessian_nf().0, &Scalar::from_int(-15));
        assert_eq!(ring("x^2 + x*y^3 + y^6").hessian_nf().0, &Scalar::from_int(45));
        assert_eq!(ring("x^2 + y^6").monomial_degree(&m(&[0, 4])), rat(4, 3));
    }

    #[test]
    fn products() {
        let r = ring("x^2 + y^6");
        let y2 = r.index_of(&m(&[0, 2])).unwrap();
        let y4 = r.index_of(&m(&[0, 4])).unwrap();
        let y1 = r.index_of(&m(&[0, 1])).unwrap();
        assert_eq!(r.product(y2, y2), &vec![(y4, Scalar::one())]);
        assert!(r.product(y4, y1).is_empty());
        let chain = ring("x^2 + x*y^3");
        assert!(chain.reduce(&p("x^2").embed(chain.vars()).unwrap()).is_empty());
        assert!(verify_frobenius(&chain, Exec::Sequential).passed());
    }

    #[test]
    fn empty_ring() {
        let r = MilnorRing::new(&empty_polynomial()).unwrap();
        assert_eq!(r.mu(), 1);
        assert_eq!(r.hessian_nf().0, &Scalar::one());
        assert_eq!(FrobeniusAlgebra::pairing(&r, 0, 0), &Scalar::one());
        assert!(verify_frobenius(&r, Exec::Sequential).passed());
    }

    #[test]
    fn degenerate_rejected() {
        let w = p("x^2*y");
        let err = MilnorRing::with_weights(&w, WeightVector { q: vec![rat(1, 3), rat(1, 3)] }, Exec::Sequential);
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }
}
