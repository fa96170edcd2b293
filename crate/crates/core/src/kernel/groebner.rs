//! Buchberger's algorithm with the normal selection strategy and both
//! Buchberger criteria.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::monomial::Monomial;
use super::order::MonomialOrder;
use super::poly::{Polynomial, Vars};
use super::scalar::{Field, Scalar};

/// Terms sorted by the ambient order, largest first.
type Terms = Vec<(Monomial, Scalar)>;

/// `p - c * m * q`
fn sub_scaled(p: Terms, q: &Terms, m: &Monomial, c: &Scalar, order: &MonomialOrder) -> Terms {
    let mut out = Vec::with_capacity(p.len() + q.len());
    let mut pi = p.into_iter().peekable();
    let mut qi = q.iter().map(|(n, d)| (n.mul(m), d * c)).peekable();
    loop {
        let ord = match (pi.peek(), qi.peek()) {
            (None, None) => break,
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (Some(a), Some(b)) => order.cmp(&a.0, &b.0),
        };
        match ord {
            Ordering::Greater => out.push(pi.next().unwrap()),
            Ordering::Less => {
                let (n, d) = qi.next().unwrap();
                out.push((n, -d));
            }
            Ordering::Equal => {
                let (a, x) = pi.next().unwrap();
                let (_, y) = qi.next().unwrap();
                let z = &x - &y;
                if !z.is_zero() {
                    out.push((a, z));
                }
            }
        }
    }
    out
}

fn make_monic(mut p: Terms) -> Terms {
    if let Some((_, lc)) = p.first() {
        if !lc.is_one() {
            let inv = lc.inv().expect("leading coefficient is a zero divisor");
            for (_, c) in p.iter_mut() {
                *c = &*c * &inv;
            }
        }
    }
    p
}

/// Full reduction of `p` by monic `basis`. Returns the remainder.
fn reduce(mut p: Terms, basis: &[Terms], order: &MonomialOrder) -> Terms {
    let mut i = 0;
    while i < p.len() {
        let divisor = basis.iter().find_map(|g| {
            let lm = &g[0].0;
            p[i].0.div(lm).map(|q| (g, q))
        });
        match divisor {
            Some((g, q)) => {
                let c = p[i].1.clone();
                let tail = p.split_off(i);
                p.extend(sub_scaled(tail, g, &q, &c, order));
            }
            None => i += 1,
        }
    }
    p
}

fn s_polynomial(f: &Terms, g: &Terms, order: &MonomialOrder) -> Terms {
    let lcm = f[0].0.lcm(&g[0].0);
    let mf = lcm.div(&f[0].0).unwrap();
    let mg = lcm.div(&g[0].0).unwrap();
    let one = Scalar::one_in(f[0].1.field());
    let fm: Terms = f.iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect();
    sub_scaled(fm, g, &mg, &one, order)
}

/// Reduced Gröbner basis of an ideal for a fixed monomial order.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    vars: Vars,
    field: Field,
    order: MonomialOrder,
    polys: Vec<Terms>,
    reduced: bool,
}

/// Standard monomials of a quotient, or a flag that the quotient is infinite dimensional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardMonomials {
    Finite(Vec<Monomial>),
    Infinite,
}

impl StandardMonomials {
    pub fn finite(self) -> Option<Vec<Monomial>> {
        match self {
            StandardMonomials::Finite(v) => Some(v),
            StandardMonomials::Infinite => None,
        }
    }
}

/// Computes the reduced Gröbner basis of `generators` under `order`.
///
/// Zero generators are ignored. The result does not depend on the order of
/// the generators.
pub fn buchberger(generators: &[Polynomial], order: &MonomialOrder) -> GroebnerBasis {
    let vars = generators.first().map(|p| p.vars().clone()).unwrap_or_else(Vars::empty);
    let mut field = Field::rationals();
    for g in generators {
        assert_eq!(g.vars(), &vars, "generators over different variables");
        field = field.join(g.field()).unwrap_or_else(|e| panic!("{e}"));
    }
    buchberger_in(&vars, &field, generators, order)
}

pub(crate) fn buchberger_in(
    vars: &Vars,
    field: &Field,
    generators: &[Polynomial],
    order: &MonomialOrder,
) -> GroebnerBasis {
    assert_eq!(order.nvars(), vars.len(), "order and variable count differ");
    let unit = |vars: &Vars| GroebnerBasis {
        vars: vars.clone(),
        field: field.clone(),
        order: order.clone(),
        polys: vec![vec![(Monomial::one(vars.len()), Scalar::one_in(field))]],
        reduced: true,
    };

    let mut basis: Vec<Terms> = Vec::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();

    let mut inputs: Vec<Terms> =
        generators.iter().filter(|p| !p.is_zero()).map(|p| make_monic(p.sorted_terms(order))).collect();
    // deterministic regardless of input permutation
    inputs.sort_by(|a, b| cmp_terms(a, b, order));
    inputs.dedup();

    let add = |h: Terms, basis: &mut Vec<Terms>, pending: &mut BTreeSet<(usize, usize)>| {
        let j = basis.len();
        basis.push(h);
        for i in 0..j {
            pending.insert((i, j));
        }
    };

    for g in inputs {
        let h = reduce(g, &basis, order);
        if h.is_empty() {
            continue;
        }
        if h[0].0.is_one() {
            return unit(vars);
        }
        add(make_monic(h), &mut basis, &mut pending);
    }

    while let Some(&(i, j)) = pending.iter().min_by(|a, b| {
        let la = basis[a.0][0].0.lcm(&basis[a.1][0].0);
        let lb = basis[b.0][0].0.lcm(&basis[b.1][0].0);
        order.cmp(&la, &lb).then_with(|| (a.1, a.0).cmp(&(b.1, b.0)))
    }) {
        pending.remove(&(i, j));
        let (lmi, lmj) = (&basis[i][0].0, &basis[j][0].0);
        if lmi.coprime(lmj) {
            continue;
        }
        let lcm = lmi.lcm(lmj);
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k][0].0.divides(&lcm)
                && !pending.contains(&key(i, k))
                && !pending.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let h = reduce(s, &basis, order);
        if h.is_empty() {
            continue;
        }
        if h[0].0.is_one() {
            return unit(vars);
        }
        add(make_monic(h), &mut basis, &mut pending);
    }

    // minimize
    let mut keep: Vec<Terms> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let lm = &g[0].0;
        let redundant = basis.iter().enumerate().any(|(l, o)| l != k && o[0].0.divides(lm) && (o[0].0 != *lm || l < k));
        if !redundant {
            keep.push(g.clone());
        }
    }
    // interreduce tails
    let mut reduced: Vec<Terms> = Vec::with_capacity(keep.len());
    for k in 0..keep.len() {
        let others: Vec<Terms> = keep.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, g)| g.clone()).collect();
        let mut g = keep[k].clone();
        let head = g.remove(0);
        let mut tail = reduce(g, &others, order);
        tail.insert(0, head);
        reduced.push(tail);
    }
    reduced.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));
    GroebnerBasis { vars: vars.clone(), field: field.clone(), order: order.clone(), polys: reduced, reduced: true }
}

fn cmp_terms(a: &Terms, b: &Terms, order: &MonomialOrder) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = order.cmp(&x.0, &y.0);
        if o != Ordering::Equal {
            return o;
        }
        let o = format!("{:?}", x.1.coeffs()).cmp(&format!("{:?}", y.1.coeffs()));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

impl GroebnerBasis {
    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// True iff the ideal is the whole ring (basis `{1}`).
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0][0].0.is_one()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|g| g[0].0.clone()).collect()
    }

    pub fn generators(&self) -> Vec<Polynomial> {
        self.polys.iter().map(|g| Polynomial::from_terms(&self.vars, &self.field, g.iter().cloned())).collect()
    }

    /// Unique remainder of `p` modulo the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        assert_eq!(p.vars(), &self.vars, "normal form over different variables");
        let r = reduce(p.sorted_terms(&self.order), &self.polys, &self.order);
        Polynomial::from_terms(&self.vars, &self.field.join(p.field()).unwrap(), r)
    }

    /// Normal form of a single term `c * m`.
    pub fn normal_form_monomial(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        let r = reduce(vec![(m.clone(), c.clone())], &self.polys, &self.order);
        Polynomial::from_terms(&self.vars, &self.field.join(c.field()).unwrap(), r)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Monomials outside the leading-term ideal, ascending in the basis order.
    pub fn standard_monomials(&self) -> StandardMonomials {
        let n = self.vars.len();
        if self.is_unit() {
            return StandardMonomials::Finite(Vec::new());
        }
        let lms = self.leading_monomials();
        let mut bounds = vec![u32::MAX; n];
        for m in &lms {
            let support: Vec<usize> = m.support().collect();
            if support.len() == 1 {
                let i = support[0];
                bounds[i] = bounds[i].min(m.exp(i));
            }
        }
        if bounds.contains(&u32::MAX) {
            return StandardMonomials::Infinite;
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        loop {
            let m = Monomial::new(cur.iter().copied());
            if !lms.iter().any(|l| l.divides(&m)) {
                out.push(m);
            }
            // odometer
            let mut k = 0;
            loop {
                if k == n {
                    out.sort_by(|a, b| self.order.cmp(a, b));
                    return StandardMonomials::Finite(out);
                }
                cur[k] += 1;
                if cur[k] < bounds[k] {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    /// Every S-polynomial of basis pairs reduces to zero.
    pub fn is_groebner(&self) -> bool {
        for i in 0..self.polys.len() {
            for j in i + 1..self.polys.len() {
                let s = s_polynomial(&self.polys[i], &self.polys[j], &self.order);
                if !reduce(s, &self.polys, &self.order).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// True iff the generators have no common zero over the algebraic closure.
pub fn ideal_is_unit(generators: &[Polynomial]) -> bool {
    let Some(first) = generators.first() else {
        return false;
    };
    buchberger(generators, &MonomialOrder::grevlex(first.nvars())).is_unit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse::parse_polynomial;
    use crate::kernel::rational::rat;
    use proptest::prelude::*;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, Some(&["x", "y"])).unwrap()
    }

    fn mons(v: &[[u32; 2]]) -> Vec<Monomial> {
        v.iter().map(|e| Monomial::new(e.iter().copied())).collect()
    }

    #[test]
    fn monomial_ideal() {
        let gb = buchberger(&[p("4*x^3"), p("4*y^3")], &MonomialOrder::lex(2));
        let gens: Vec<String> = gb.generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(gens, vec!["y^3", "x^3"]);
    }

    #[test]
    fn chain_jacobian() {
        let w = p("x^2 + x*y^3");
        let gens = [w.partial_derivative(0), w.partial_derivative(1)];
        let gb = buchberger(&gens, &MonomialOrder::weighted(vec![rat(1, 2), rat(1, 6)]));
        assert!(gb.is_groebner());
        let mut sm = gb.standard_monomials().finite().unwrap();
        sm.sort();
        let mut expect = mons(&[[0, 0], [0, 1], [0, 2], [0, 3], [0, 4]]);
        expect.sort();
        assert_eq!(sm, expect);
        // Hess = 12xy - 9y^4 reduces to -15 y^4
        let nf = gb.normal_form(&w.hessian());
        assert_eq!(nf, p("-15*y^4"));
    }

    #[test]
    fn unit_ideal() {
        assert!(ideal_is_unit(&[p("x"), p("x + 1")]));
        assert!(!ideal_is_unit(&[p("x^2 - 1")]));
        let gb = buchberger(&[p("x"), p("x + 1")], &MonomialOrder::grevlex(2));
        assert!(gb.is_unit());
        assert_eq!(gb.generators()[0].to_string(), "1");
    }

    #[test]
    fn normal_forms() {
        let gb = buchberger(&[p("x^3"), p("y^3")], &MonomialOrder::grevlex(2));
        assert!(gb.normal_form(&p("x^4")).is_zero());
        assert_eq!(gb.normal_form(&p("1")), p("1"));
    }

    #[test]
    fn fermat_standard_monomials() {
        let w = p("x^4 + y^4");
        let gb = buchberger(&[w.partial_derivative(0), w.partial_derivative(1)], &MonomialOrder::grevlex(2));
        let mut sm = gb.standard_monomials().finite().unwrap();
        sm.sort();
        let mut expect = mons(&[[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2], [2, 0], [2, 1], [2, 2]]);
        expect.sort();
        assert_eq!(sm, expect);
        let w = p("x^2 + y^6");
        let gb = buchberger(&[w.partial_derivative(0), w.partial_derivative(1)], &MonomialOrder::grevlex(2));
        assert_eq!(gb.standard_monomials().finite().unwrap().len(), 5);
    }

    #[test]
    fn infinite_quotient() {
        let gb = buchberger(&[p("x")], &MonomialOrder::grevlex(2));
        assert_eq!(gb.standard_monomials(), StandardMonomials::Infinite);
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((0u32..3, 0u32..3, -3i64..4), 1..4).prop_map(|ts| {
            let vars = Vars::new(["x", "y"]);
            Polynomial::from_terms(
                &vars,
                &Field::rationals(),
                ts.into_iter().map(|(a, b, c)| (Monomial::new([a, b]), Scalar::from_int(c))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn normal_form_is_linear_and_multiplicative(a in small_poly(), b in small_poly()) {
            let w = p("x^3 + x*y^2");
            let gb = buchberger(&[w.partial_derivative(0), w.partial_derivative(1)], &MonomialOrder::grevlex(2));
            let nf = |q: &Polynomial| gb.normal_form(q);
            prop_assert_eq!(nf(&a.add(&b)), nf(&a).add(&nf(&b)));
            prop_assert_eq!(nf(&a.mul(&b)), nf(&nf(&a).mul(&nf(&b))));
        }

        #[test]
        fn basis_independent_of_generator_order(a in small_poly(), b in small_poly(), c in small_poly()) {
            let o = MonomialOrder::grevlex(2);
            let g1 = buchberger(&[a.clone(), b.clone(), c.clone()], &o);
            let g2 = buchberger(&[c, a, b], &o);
            prop_assert!(g1.is_groebner());
            prop_assert_eq!(g1.generators(), g2.generators());
        }
    }
}
