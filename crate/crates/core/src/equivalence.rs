//! Search for weighted-homogeneous linear-equivalence substitutions `W1 = W2 ∘ h`.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernel::poly::determinant;
use crate::kernel::rational::{fmt_rat, rat};
use crate::kernel::univariate::{binomial_factor, certify_irreducible};
use crate::kernel::{
    buchberger, Field, GroebnerBasis, Modulus, Monomial, MonomialOrder, Polynomial, Rational, Scalar,
    StandardMonomials, UPoly, Vars,
};
use crate::linalg::{self, EchelonBasis};
use crate::structure::require_admissible;

/// `h`: one image per variable of `W2`, written in the variables of `W1`.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub target_vars: Vec<String>,
    pub images: Vec<Polynomial>,
    pub field: Field,
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, p)) in self.target_vars.iter().zip(&self.images).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {p}")?;
        }
        if let Some(m) = self.field.modulus() {
            write!(f, " over Q[{}]/({})", m.symbol(), m.poly().display(m.symbol()))?;
        }
        Ok(())
    }
}

/// The coefficient system whose Gröbner basis is `{1}`.
#[derive(Clone, Debug)]
pub struct UnitCertificate {
    pub unknowns: Vec<String>,
    pub equations: Vec<Polynomial>,
    pub groebner_basis: Vec<Polynomial>,
}

#[derive(Clone, Debug)]
pub enum EquivalenceResult {
    /// A substitution with `W2 ∘ h = W1`, re-verified by exact expansion.
    Equivalent(Substitution),
    /// No invertible weighted substitution exists.
    Inequivalent(UnitCertificate),
}

impl EquivalenceResult {
    pub fn witness(&self) -> Option<&Substitution> {
        match self {
            EquivalenceResult::Equivalent(s) => Some(s),
            EquivalenceResult::Inequivalent(_) => None,
        }
    }
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Monomials in `n` variables of weighted degree exactly `d`.
fn monomials_of_weight(weights: &[Rational], d: &Rational) -> Vec<Monomial> {
    fn rec(weights: &[Rational], i: usize, left: Rational, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == weights.len() {
            if left.is_zero() {
                out.push(Monomial::new(cur.iter().copied()));
            }
            return;
        }
        let mut rest = left;
        let mut e = 0;
        while rest >= Rational::zero() {
            cur.push(e);
            rec(weights, i + 1, rest.clone(), cur, out);
            cur.pop();
            rest -= &weights[i];
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, d.clone(), &mut Vec::new(), &mut out);
    out
}

/// The polynomial system in the unknown coefficients of `h`.
struct System {
    unknown_vars: Vars,
    /// `(target variable, W1 monomial)` per unknown, excluding the saturation unknown.
    slots: Vec<(usize, Monomial)>,
    equations: Vec<Polynomial>,
}

fn build_system(w1: &Polynomial, w2: &Polynomial, q1: &[Rational], q2: &[Rational]) -> System {
    let n = w1.nvars();
    let xnames = w1.vars().names().to_vec();
    let mut slots = Vec::new();
    for (j, qj) in q2.iter().enumerate() {
        for m in monomials_of_weight(q1, qj) {
            slots.push((j, m));
        }
    }
    let mut unames: Vec<String> = (0..slots.len()).map(|k| fresh_name(&format!("h{k}"), &xnames)).collect();
    unames.push(fresh_name("sat", &xnames));
    let k = slots.len();
    let all = Vars::new(xnames.iter().cloned().chain(unames.iter().cloned()));
    let total = n + k + 1;
    let mono = |x: &Monomial, u: Option<usize>| {
        let mut e: Vec<u32> = x.exps().to_vec();
        e.resize(total, 0);
        if let Some(u) = u {
            e[n + u] = 1;
        }
        Monomial::new(e)
    };
    let images: Vec<Polynomial> = (0..n)
        .map(|j| {
            Polynomial::from_terms(
                &all,
                &Field::rationals(),
                slots.iter().enumerate().filter(|(_, s)| s.0 == j).map(|(u, s)| (mono(&s.1, Some(u)), Scalar::one())),
            )
        })
        .collect();
    let composed = w2.compose(&images);
    let lifted = Polynomial::from_terms(&all, &Field::rationals(), w1.terms().map(|(m, c)| (mono(m, None), c.clone())));
    let diff = composed.sub(&lifted);

    // group by x-monomial
    let unknown_vars = Vars::new(unames.clone());
    let mut groups: std::collections::BTreeMap<Vec<u32>, Polynomial> = std::collections::BTreeMap::new();
    for (m, c) in diff.terms() {
        let key = m.exps()[..n].to_vec();
        let um = Monomial::new(m.exps()[n..].iter().copied());
        groups
            .entry(key)
            .or_insert_with(|| Polynomial::zero(&unknown_vars, &Field::rationals()))
            .add_term(um, c.clone());
    }
    let mut equations: Vec<Polynomial> = groups.into_values().filter(|p| !p.is_zero()).collect();

    // saturation: sat * det(linear part) - 1
    let ulin: Vec<Vec<Polynomial>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let xi = Monomial::var(n, i);
                    match slots.iter().position(|s| s.0 == j && s.1 == xi) {
                        Some(u) => Polynomial::var(&unknown_vars, u),
                        None => Polynomial::zero(&unknown_vars, &Field::rationals()),
                    }
                })
                .collect()
        })
        .collect();
    let det = determinant(&ulin, &unknown_vars, &Field::rationals());
    let sat = Polynomial::var(&unknown_vars, k);
    equations.push(sat.mul(&det).sub(&Polynomial::one(&unknown_vars)));
    System { unknown_vars, slots, equations }
}

fn groebner(eqs: &[Polynomial]) -> GroebnerBasis {
    let n = eqs[0].nvars();
    buchberger(eqs, &MonomialOrder::grevlex(n))
}

fn nf_vector(gb: &GroebnerBasis, basis: &[Monomial], p: &Polynomial) -> Vec<Scalar> {
    let nf = gb.normal_form(p);
    basis.iter().map(|m| nf.coefficient(m)).collect()
}

/// Minimal polynomial of `p` in the finite-dimensional quotient.
fn minimal_polynomial(gb: &GroebnerBasis, basis: &[Monomial], p: &Polynomial) -> UPoly {
    let vars = gb.vars().clone();
    let mut ech = EchelonBasis::new();
    let mut power = Polynomial::one(&vars);
    loop {
        let v = nf_vector(gb, basis, &power);
        if let Some(coeffs) = ech.insert(&v) {
            let d = coeffs.len();
            let mut c: Vec<Rational> = coeffs.iter().map(|s| -s.to_rational().expect("rational quotient")).collect();
            c.resize(d, Rational::zero());
            c.push(Rational::from_integer(1.into()));
            return UPoly::new(c);
        }
        power = gb.normal_form(&power.mul(p));
    }
}

fn finite_basis(gb: &GroebnerBasis) -> Option<Vec<Monomial>> {
    match gb.standard_monomials() {
        StandardMonomials::Finite(v) => Some(v),
        StandardMonomials::Infinite => None,
    }
}

fn choose_modulus(m: &UPoly, taken: &[String]) -> Result<Option<Field>> {
    if m.degree() == Some(1) {
        return Ok(None);
    }
    let symbol = ["r", "s", "t", "u", "alpha"]
        .into_iter()
        .find(|s| !taken.iter().any(|t| t == s))
        .unwrap_or("alpha")
        .to_string();
    let modulus = if certify_irreducible(m) == Some(true) {
        Modulus::new_strict(symbol, m.clone())?
    } else if let Some((k, a)) = m.as_binomial() {
        let (f, _) = binomial_factor(k, &a);
        if f.degree() == Some(1) {
            return Ok(None);
        }
        Modulus::new_lenient(symbol, f)?
    } else {
        Modulus::new_lenient(symbol, m.clone())?
    };
    Ok(Some(Field::extension(modulus)))
}

/// Searches weighted-homogeneous substitutions `h` with `W2 ∘ h = W1` and
/// invertible linear part. A Gröbner basis `{1}` of the coefficient system
/// proves that none exists.
pub fn search_linear_equivalence(w1: &Polynomial, w2: &Polynomial) -> Result<EquivalenceResult> {
    let q1 = require_admissible(w1)?;
    let q2 = require_admissible(w2)?;
    if w1.nvars() != w2.nvars() {
        return Err(Error::VariableCountMismatch(w1.nvars(), w2.nvars()));
    }
    if q1.sorted() != q2.sorted() {
        return Err(Error::WeightMismatch(q1.to_string(), q2.to_string()));
    }
    let sys = build_system(w1, w2, &q1.q, &q2.q);
    let gb = groebner(&sys.equations);
    if gb.is_unit() {
        return Ok(EquivalenceResult::Inequivalent(UnitCertificate {
            unknowns: sys.unknown_vars.names().to_vec(),
            equations: sys.equations.clone(),
            groebner_basis: gb.generators(),
        }));
    }

    // fix unknowns to small rationals while the system stays consistent
    let k = sys.unknown_vars.len();
    let candidates = [rat(1, 1), rat(0, 1), rat(-1, 1), rat(2, 1), rat(-2, 1), rat(1, 2), rat(-1, 2)];
    let mut eqs = gb.generators();
    let mut fixed: Vec<Option<Rational>> = vec![None; k];
    for u in 0..k - 1 {
        for c in &candidates {
            let mut trial = eqs.clone();
            let lin = Polynomial::var(&sys.unknown_vars, u)
                .sub(&Polynomial::constant(&sys.unknown_vars, Scalar::rational(c.clone())));
            trial.push(lin);
            let g = groebner(&trial);
            if !g.is_unit() {
                eqs = g.generators();
                fixed[u] = Some(c.clone());
                break;
            }
        }
    }
    let mut gb = groebner(&eqs);
    let mut basis = finite_basis(&gb).ok_or_else(|| {
        Error::SearchInconclusive(
            "coefficient system has a positive-dimensional solution set after fixing unknowns".into(),
        )
    })?;

    // shrink to fewer points: pick a rational root or an irreducible binomial
    // factor of each coordinate's minimal polynomial
    for u in 0..k {
        if fixed[u].is_some() || basis.len() == 1 {
            continue;
        }
        let var = Polynomial::var(&sys.unknown_vars, u);
        let sf = minimal_polynomial(&gb, &basis, &var).square_free_part();
        let factor = if let Some(r) = sf.rational_roots().into_iter().next() {
            UPoly::new(vec![-r, Rational::from_integer(1.into())])
        } else if let Some((d, a)) = sf.as_binomial() {
            binomial_factor(d, &a).0
        } else {
            continue;
        };
        if factor.degree() == sf.degree() {
            continue;
        }
        let mut trial = gb.generators();
        trial.push(upoly_in(&factor, &sys.unknown_vars, u));
        gb = groebner(&trial);
        basis = finite_basis(&gb).expect("subideal of a zero-dimensional ideal");
    }

    // radical via square-free parts of the coordinate minimal polynomials
    let mut eqs = gb.generators();
    for u in 0..k {
        let mp = minimal_polynomial(&gb, &basis, &Polynomial::var(&sys.unknown_vars, u));
        let sf = mp.square_free_part();
        if sf.degree() < mp.degree() {
            eqs.push(upoly_in(&sf, &sys.unknown_vars, u));
        }
    }
    let gb = groebner(&eqs);
    let basis = finite_basis(&gb).expect("radical of a zero-dimensional ideal");
    let dim = basis.len();

    // separating linear form
    let mut forms: Vec<Polynomial> = (0..k).map(|u| Polynomial::var(&sys.unknown_vars, u)).collect();
    for j in 2..(2 + 2 * k as i64) {
        let mut p = Polynomial::zero(&sys.unknown_vars, &Field::rationals());
        let mut c = Rational::from_integer(1.into());
        for u in 0..k {
            p = p.add(&Polynomial::var(&sys.unknown_vars, u).scale(&Scalar::rational(c.clone())));
            c *= Rational::from_integer(j.into());
        }
        forms.push(p);
    }
    let (ell, minpoly) = forms
        .into_iter()
        .map(|f| {
            let m = minimal_polynomial(&gb, &basis, &f);
            (f, m)
        })
        .find(|(_, m)| m.degree() == Some(dim))
        .ok_or_else(|| Error::SearchInconclusive("no separating linear form found".into()))?;

    // coordinates as polynomials in ell
    let powers: Vec<Vec<Scalar>> = {
        let mut out = Vec::with_capacity(dim);
        let mut p = Polynomial::one(&sys.unknown_vars);
        for _ in 0..dim {
            out.push(nf_vector(&gb, &basis, &p));
            p = gb.normal_form(&p.mul(&ell));
        }
        out
    };
    let matrix: Vec<Vec<Scalar>> = (0..dim).map(|r| (0..dim).map(|c| powers[c][r].clone()).collect()).collect();
    let taken: Vec<String> = w1.vars().names().to_vec();
    let field = choose_modulus(&minpoly, &taken)?;
    let root = match &field {
        Some(f) => Scalar::generator(f),
        None => Scalar::rational(minpoly.rational_roots().into_iter().next().expect("linear factor has a root")),
    };
    let eval = |coeffs: &[Scalar]| -> Scalar {
        let mut acc = Scalar::zero();
        let mut pw = Scalar::one();
        for c in coeffs {
            acc = &acc + &(c * &pw);
            pw = &pw * &root;
        }
        acc
    };
    let mut values = Vec::with_capacity(k);
    for (u, fx) in fixed.iter().enumerate() {
        if let Some(c) = fx {
            values.push(Scalar::rational(c.clone()));
            continue;
        }
        let target = nf_vector(&gb, &basis, &Polynomial::var(&sys.unknown_vars, u));
        let coeffs = linalg::solve(&matrix, &target)
            .ok_or_else(|| Error::SearchInconclusive("coordinate not expressible in the separating form".into()))?;
        values.push(eval(&coeffs));
    }

    let field = field.unwrap_or_else(Field::rationals);
    let n = w1.nvars();
    let images: Vec<Polynomial> = (0..n)
        .map(|j| {
            Polynomial::from_terms(
                w1.vars(),
                &field,
                sys.slots
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.0 == j)
                    .map(|(u, s)| (s.1.clone(), values[u].embed(&field).expect("value in the chosen field"))),
            )
        })
        .collect();
    let sub = Substitution { target_vars: w2.vars().names().to_vec(), images, field };
    if !verify_substitution(w1, w2, &sub)? {
        return Err(Error::SearchInconclusive(format!("extracted substitution {sub} does not satisfy W2 ∘ h = W1")));
    }
    Ok(EquivalenceResult::Equivalent(sub))
}

fn upoly_in(p: &UPoly, vars: &Vars, u: usize) -> Polynomial {
    let n = vars.len();
    Polynomial::from_terms(
        vars,
        &Field::rationals(),
        p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(e, c)| {
            let mut m = vec![0u32; n];
            m[u] = e as u32;
            (Monomial::new(m), Scalar::rational(c.clone()))
        }),
    )
}

/// Exact check of `W2 ∘ h = W1`.
pub fn verify_substitution(w1: &Polynomial, w2: &Polynomial, h: &Substitution) -> Result<bool> {
    let lhs = w2.extend_scalars(&h.field)?.compose(&h.images);
    let rhs = w1.extend_scalars(&h.field)?;
    Ok(lhs.sub(&rhs).is_zero())
}

/// Short summary of a unit certificate.
pub fn describe_certificate(c: &UnitCertificate) -> String {
    format!(
        "{} equations in {} unknowns ({}); reduced Groebner basis = {{{}}}",
        c.equations.len(),
        c.unknowns.len(),
        c.unknowns.join(", "),
        c.groebner_basis.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
    )
}

/// Formats a rational for reports.
pub fn show(q: &Rational) -> String {
    fmt_rat(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, Some(&["x", "y"])).unwrap()
    }

    #[test]
    fn weight_monomials() {
        let ms = monomials_of_weight(&[rat(1, 2), rat(1, 6)], &rat(1, 2));
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn self_equivalence_is_identity() {
        let w = p("x^2 + y^6");
        let r = search_linear_equivalence(&w, &w).unwrap();
        let h = r.witness().unwrap();
        assert_eq!(h.images[0].to_string(), "x");
        assert_eq!(h.images[1].to_string(), "y");
    }

    #[test]
    fn chain_witness() {
        let (w1, w2) = (p("x^2 + y^6"), p("x^2 + x*y^3"));
        let r = search_linear_equivalence(&w1, &w2).unwrap();
        let h = r.witness().expect("equivalent");
        assert!(verify_substitution(&w1, &w2, h).unwrap());
        assert!(!h.field.is_rational());
    }

    #[test]
    fn different_weights_rejected() {
        assert!(matches!(search_linear_equivalence(&p("x^3 + y^3"), &p("x^2 + y^6")), Err(Error::WeightMismatch(..))));
    }
}
