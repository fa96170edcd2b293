//! Independent check of Milnor rings by graded linear algebra: in each
//! weighted degree the quotient is (all monomials) / (degree part of the
//! Jacobian ideal), computed here by plain Gaussian elimination.

use std::collections::BTreeMap;

use lgb_core::algebra::FrobeniusAlgebra;
use lgb_core::kernel::{parse_polynomial, Monomial, Polynomial, Rational};
use lgb_core::milnor::{verify_frobenius, MilnorRing};
use lgb_core::structure::compute_weights;
use lgb_core::Exec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const SMALL: &[&str] = &[
    "x^3",
    "x^6",
    "x^2 + y^6",
    "x^3 + y^3",
    "x^4 + y^4",
    "x^3*y + x*y^3",
    "x^2*y + x*y^2",
    "x^2 + x*y^3",
    "x^2*y + y^3",
    "x^3*y + y^4",
    "x^2 + y^2 + z^2",
    "x^2*y + y^2*z + z^3",
    "x^4 + y^4 + x^2*y^2",
    "x^2 + x*y^3 + y^6",
    "x^2 + y^3 + z^3",
    "x^2*y + y^3 + z^2",
];

type Row = BTreeMap<Monomial, Rational>;

fn to_row(p: &Polynomial) -> Row {
    p.to_rational_coeffs().expect("rational coefficients").into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Integer weights `a_i` and the integer degree of W over a common denominator.
fn integer_weights(q: &[Rational]) -> (Vec<i64>, i64) {
    let den = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let a = q.iter().map(|x| (x * Rational::from(den.clone())).to_integer().to_i64().unwrap()).collect();
    (a, den.to_i64().unwrap())
}

fn monomials_of_degree(a: &[i64], d: i64) -> Vec<Monomial> {
    fn go(a: &[i64], i: usize, left: i64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == a.len() {
            if left == 0 {
                out.push(Monomial::new(cur.clone()));
            }
            return;
        }
        let mut e = 0;
        while e * a[i] <= left {
            cur.push(e as u32);
            go(a, i + 1, left - e * a[i], cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    if d >= 0 {
        go(a, 0, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Row-reduces in place and returns the rank.
fn eliminate(rows: &mut Vec<Row>) -> usize {
    let mut reduced: Vec<Row> = Vec::new();
    for mut r in rows.drain(..) {
        for p in &reduced {
            let (lead, lc) = p.iter().next().unwrap();
            if let Some(c) = r.get(lead).cloned() {
                let f = c / lc;
                for (m, v) in p {
                    let e = r.entry(m.clone()).or_insert_with(Rational::zero);
                    *e -= &f * v;
                }
                r.retain(|_, v| !v.is_zero());
            }
        }
        if !r.is_empty() {
            reduced.push(r);
        }
    }
    let n = reduced.len();
    *rows = reduced;
    n
}

struct Graded {
    a: Vec<i64>,
    partials: Vec<(Polynomial, i64)>,
}

impl Graded {
    fn new(w: &Polynomial) -> Graded {
        let q = compute_weights(w).unwrap();
        let (a, den) = integer_weights(&q.q);
        let partials = (0..w.nvars()).map(|i| (w.partial_derivative(i), den - a[i])).collect();
        Graded { a, partials }
    }

    fn jacobian_part(&self, d: i64) -> Vec<Row> {
        let mut rows = Vec::new();
        for (p, deg) in &self.partials {
            for m in monomials_of_degree(&self.a, d - deg) {
                let r = to_row(&p.mul_monomial(&m, &lgb_core::kernel::Scalar::one()));
                if !r.is_empty() {
                    rows.push(r);
                }
            }
        }
        rows
    }

    fn quotient_dim(&self, d: i64) -> usize {
        let mut rows = self.jacobian_part(d);
        monomials_of_degree(&self.a, d).len() - eliminate(&mut rows)
    }

    fn in_ideal(&self, d: i64, r: Row) -> bool {
        let mut rows = self.jacobian_part(d);
        let before = eliminate(&mut rows);
        rows.push(r);
        eliminate(&mut rows) == before
    }
}

fn weighted(a: &[i64], m: &Monomial) -> i64 {
    m.exps().iter().zip(a).map(|(e, w)| *e as i64 * w).sum()
}

#[test]
fn graded_dimensions_match_standard_monomials() {
    for s in SMALL {
        let w = parse_polynomial(s, None).unwrap();
        let ring = MilnorRing::new(&w).unwrap();
        assert!(ring.mu() <= 12, "{s}");
        let g = Graded::new(&w);
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for m in ring.basis() {
            *counts.entry(weighted(&g.a, m)).or_default() += 1;
        }
        let top = *counts.keys().max().unwrap();
        let mut total = 0;
        for d in 0..=top + g.a.iter().max().unwrap() * 2 {
            let dim = g.quotient_dim(d);
            total += dim;
            assert_eq!(dim, counts.get(&d).copied().unwrap_or(0), "{s}: degree {d}");
        }
        assert_eq!(total, ring.mu(), "{s}");
        assert_eq!(counts[&top], 1, "{s}: top degree is one-dimensional");
    }
}

#[test]
fn product_table_agrees_modulo_jacobian() {
    for s in SMALL {
        let w = parse_polynomial(s, None).unwrap();
        let ring = MilnorRing::new(&w).unwrap();
        let g = Graded::new(&w);
        let basis = ring.basis();
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let prod = basis[i].mul(&basis[j]);
                let d = weighted(&g.a, &prod);
                let mut r: Row = BTreeMap::from([(prod, Rational::one())]);
                for (k, c) in FrobeniusAlgebra::product(&ring, i, j) {
                    let c = c.to_rational().expect("rational structure constants");
                    let e = r.entry(basis[*k].clone()).or_insert_with(Rational::zero);
                    *e -= c;
                }
                r.retain(|_, v| !v.is_zero());
                assert!(r.is_empty() || g.in_ideal(d, r), "{s}: product {i} * {j}");
            }
        }
    }
}

#[test]
fn hessian_reduction_agrees_modulo_jacobian() {
    for s in SMALL {
        let w = parse_polynomial(s, None).unwrap();
        let ring = MilnorRing::new(&w).unwrap();
        let g = Graded::new(&w);
        let (h, top) = ring.hessian_nf();
        assert!(!h.is_zero());
        let mut r = to_row(&w.hessian());
        let e = r.entry(top.clone()).or_insert_with(Rational::zero);
        *e -= h.to_rational().unwrap();
        r.retain(|_, v| !v.is_zero());
        let d = weighted(&g.a, top);
        assert!(r.is_empty() || g.in_ideal(d, r), "{s}");
        // <1, top> is normalised so that <1, hess> = mu
        let one = ring.index_of(&Monomial::one(w.nvars())).unwrap();
        let t = ring.index_of(top).unwrap();
        let p = FrobeniusAlgebra::pairing(&ring, one, t).to_rational().unwrap();
        assert_eq!(p * h.to_rational().unwrap(), Rational::from_integer(ring.mu().into()), "{s}");
    }
}

#[test]
fn every_small_ring_is_frobenius() {
    for s in SMALL {
        let w = parse_polynomial(s, None).unwrap();
        let ring = MilnorRing::new(&w).unwrap();
        let report = verify_frobenius(&ring, Exec::Sequential);
        assert!(report.passed(), "{s}: {:?}", report.failed_checks());
    }
}

#[test]
fn pairing_matrix_is_nonsingular_and_symmetric() {
    for s in SMALL {
        let w = parse_polynomial(s, None).unwrap();
        let ring = MilnorRing::new(&w).unwrap();
        let m = ring.pairing_matrix();
        let n = m.len();
        let mut rows: Vec<Row> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(m[i][j], m[j][i], "{s}");
            }
            let r: Row = (0..n)
                .filter_map(|j| {
                    let c = m[i][j].to_rational().unwrap();
                    (!c.is_zero()).then(|| (Monomial::new([j as u32]), c))
                })
                .collect();
            rows.push(r);
        }
        assert_eq!(eliminate(&mut rows), n, "{s}");
    }
}
