use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::monomial::Monomial;
use super::order::MonomialOrder;
use super::rational::Rational;
use super::scalar::{Field, Scalar};
use super::KernelError;

/// Ordered list of variable names shared by polynomials of one ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Vars(names.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        Vars(Arc::from(Vec::<String>::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    pub fn subset(&self, indices: &[usize]) -> Vars {
        Vars::new(indices.iter().map(|&i| self.0[i].clone()))
    }
}

/// Exact multivariate polynomial. Terms never carry zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vars,
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(vars: &Vars, field: &Field) -> Self {
        Polynomial { vars: vars.clone(), field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Scalar) -> Self {
        let field = c.field().clone();
        Polynomial::from_terms(vars, &field, [(Monomial::one(vars.len()), c)])
    }

    pub fn one(vars: &Vars) -> Self {
        Polynomial::constant(vars, Scalar::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Polynomial::monomial(vars, Monomial::var(vars.len(), i), Scalar::one())
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Scalar) -> Self {
        let field = c.field().clone();
        Polynomial::from_terms(vars, &field, [(m, c)])
    }

    /// Builds from terms, summing repeated monomials and promoting coefficients
    /// into a common field.
    pub fn from_terms(vars: &Vars, field: &Field, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Polynomial::zero(vars, field);
        for (m, c) in terms {
            assert_eq!(m.nvars(), vars.len(), "monomial length does not match variables");
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        if &self.field != c.field() {
            self.field = self.field.join(c.field()).unwrap_or_else(|e| panic!("{e}"));
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order: lexicographically descending.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| Scalar::zero_in(&self.field))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Terms sorted by `order`, largest first.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(Monomial, Scalar)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    fn check_compatible(&self, other: &Polynomial) {
        assert_eq!(self.vars, other.vars, "polynomials live over different variables");
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars, &self.field.join(c.field()).unwrap());
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars, &self.field.join(c.field()).unwrap());
        for (n, a) in &self.terms {
            out.add_term(n.mul(m), a * c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.check_compatible(other);
        let field = self.field.join(other.field()).unwrap_or_else(|e| panic!("{e}"));
        let mut out = Polynomial::zero(&self.vars, &field);
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                out.add_term(m.mul(n), a * b);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(&self.vars, Scalar::one_in(&self.field));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars(), "variable index out of range");
        let mut out = Polynomial::zero(&self.vars, &self.field);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), c.scale(&Rational::from_integer(e.into())));
        }
        out
    }

    /// `self(images[0], …, images[n-1])`; images share one variable list.
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars(), "one image per variable required");
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(Vars::empty);
        let mut field = self.field.clone();
        for p in images {
            field = field.join(p.field()).unwrap_or_else(|e| panic!("{e}"));
        }
        // cache powers per variable
        let mut powers: Vec<Vec<Polynomial>> =
            images.iter().map(|p| vec![Polynomial::constant(&target, Scalar::one_in(&p.field)), p.clone()]).collect();
        let mut out = Polynomial::zero(&target, &field);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(&target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Keeps monomials supported on `indices`; the result lives over those variables only.
    pub fn restrict(&self, indices: &[usize]) -> Polynomial {
        let vars = self.vars.subset(indices);
        let mut out = Polynomial::zero(&vars, &self.field);
        for (m, c) in &self.terms {
            if m.support().all(|i| indices.contains(&i)) {
                out.add_term(m.project(indices), c.clone());
            }
        }
        out
    }

    /// Re-expresses over `vars`, which must contain every variable of `self`.
    pub fn embed(&self, vars: &Vars) -> Result<Polynomial, KernelError> {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|v| vars.index_of(v).ok_or_else(|| KernelError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let mut out = Polynomial::zero(vars, &self.field);
        for (m, c) in &self.terms {
            out.add_term(m.inject(&map, vars.len()), c.clone());
        }
        Ok(out)
    }

    /// Re-embeds all coefficients into `field`.
    pub fn extend_scalars(&self, field: &Field) -> Result<Polynomial, KernelError> {
        let mut out = Polynomial::zero(&self.vars, field);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.embed(field)?);
        }
        Ok(out)
    }

    /// Checks every term has weighted degree `deg`.
    pub fn is_weighted_homogeneous(&self, weights: &[Rational], deg: &Rational) -> bool {
        self.terms.keys().all(|m| &m.weighted_degree(weights) == deg)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Constant and linear part vanish.
    pub fn has_no_low_terms(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() >= 2)
    }

    pub fn hessian(&self) -> Polynomial {
        let n = self.nvars();
        let first: Vec<Polynomial> = (0..n).map(|i| self.partial_derivative(i)).collect();
        let matrix: Vec<Vec<Polynomial>> =
            (0..n).map(|i| (0..n).map(|j| first[i].partial_derivative(j)).collect()).collect();
        determinant(&matrix, &self.vars, &self.field)
    }

    pub fn to_rational_coeffs(&self) -> Option<Vec<(Monomial, Rational)>> {
        self.terms.iter().map(|(m, c)| Some((m.clone(), c.to_rational()?))).collect()
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.exps().iter().copied()).max().unwrap_or(0)
    }
}

/// Laplace expansion along the first row; the matrices here are small.
pub fn determinant(m: &[Vec<Polynomial>], vars: &Vars, field: &Field) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::constant(vars, Scalar::one_in(field));
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = Polynomial::zero(vars, field);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = m[0][j].mul(&determinant(&minor, vars, field));
        out = if j % 2 == 0 { out.add(&term) } else { out.sub(&term) };
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names = self.vars.names();
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative_rational();
            let abs = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let coeff = if abs.is_compound() { format!("({abs})") } else { abs.to_string() };
            if m.is_one() {
                f.write_str(&coeff)?;
            } else if abs.is_one() {
                write!(f, "{}", m.display(names))?;
            } else {
                write!(f, "{}*{}", coeff, m.display(names))?;
            }
        }
        Ok(())
    }
}

pub fn rational_poly(vars: &Vars, terms: &[(&[u32], Rational)]) -> Polynomial {
    Polynomial::from_terms(
        vars,
        &Field::rationals(),
        terms.iter().map(|(e, c)| (Monomial::new(e.iter().copied()), Scalar::rational(c.clone()))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, Some(&["x", "y"])).unwrap()
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x^4 + y^4").partial_derivative(0), p("4*x^3"));
        assert_eq!(p("x^2 + x*y^3 + y^6").partial_derivative(1), p("3*x*y^2 + 6*y^5"));
        assert!(p("y^4").partial_derivative(0).is_zero());
    }

    #[test]
    fn hessians() {
        assert_eq!(p("x^4 + y^4").hessian(), p("144*x^2*y^2"));
        assert_eq!(p("x^2 + y^6").hessian(), p("60*y^4"));
        assert_eq!(p("x^2 + x*y^3").hessian(), p("12*x*y - 9*y^4"));
    }

    #[test]
    fn composition_and_restriction() {
        let w = p("x^3*y + x*y^3");
        let h = [p("x - y"), p("x + y")];
        assert_eq!(w.compose(&h), p("2*x^4 - 2*y^4"));
        let r = p("x^2*y + y^3").restrict(&[1]);
        assert_eq!(r.to_string(), "y^3");
        assert_eq!(r.nvars(), 1);
        assert_eq!(p("x^2 + y^6").restrict(&[]).nvars(), 0);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(p("y^6 + x*y^3 + x^2").to_string(), "x^2 + x*y^3 + y^6");
        assert_eq!(p("-15*y^4 + 1/2*x").to_string(), "1/2*x - 15*y^4");
    }
}
