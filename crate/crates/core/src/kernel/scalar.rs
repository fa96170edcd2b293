//! Exact scalars in `Q[t]/(m(t))`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rat, Rational};
use super::univariate::{binomial_factor, certify_irreducible, UPoly};
use super::KernelError;

/// A monic square-free modulus `m(t)` together with its display symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    symbol: String,
    poly: UPoly,
    certified_irreducible: bool,
}

impl Modulus {
    /// Accepts any nonconstant square-free modulus. Irreducibility is recorded
    /// when it can be certified; an uncertified modulus still gives exact
    /// arithmetic, but may contain zero divisors.
    pub fn new(symbol: impl Into<String>, poly: UPoly) -> Result<Self, KernelError> {
        let poly = poly.monic();
        if poly.degree().unwrap_or(0) == 0 {
            return Err(KernelError::BadModulus("modulus must be nonconstant".into()));
        }
        if !poly.is_square_free() {
            return Err(KernelError::BadModulus(format!("modulus {} is not square-free", poly.display("t"))));
        }
        match certify_irreducible(&poly) {
            Some(false) => Err(KernelError::ReducibleModulus(poly.display("t"))),
            cert => Ok(Modulus { symbol: symbol.into(), poly, certified_irreducible: cert == Some(true) }),
        }
    }

    /// Like [`Modulus::new`] but also accepts provably reducible moduli
    /// (square-free check only). Arithmetic stays exact componentwise.
    pub fn new_lenient(symbol: impl Into<String>, poly: UPoly) -> Result<Self, KernelError> {
        let poly = poly.monic();
        if poly.degree().unwrap_or(0) == 0 || !poly.is_square_free() {
            return Err(KernelError::BadModulus(format!(
                "modulus {} must be nonconstant and square-free",
                poly.display("t")
            )));
        }
        let cert = certify_irreducible(&poly) == Some(true);
        Ok(Modulus { symbol: symbol.into(), poly, certified_irreducible: cert })
    }

    /// Strict constructor: irreducibility must be certified.
    pub fn new_strict(symbol: impl Into<String>, poly: UPoly) -> Result<Self, KernelError> {
        let m = Modulus::new(symbol, poly)?;
        if m.certified_irreducible {
            Ok(m)
        } else {
            Err(KernelError::ReducibleModulus(format!("{} (irreducibility not certified)", m.poly.display("t"))))
        }
    }

    /// Field generated by a root of `t^k = a`, splitting off an irreducible
    /// factor when the binomial is reducible.
    pub fn root_of(symbol: impl Into<String>, k: usize, a: &Rational) -> Result<Self, KernelError> {
        if a.is_zero() {
            return Err(KernelError::BadModulus("root of zero requested".into()));
        }
        let (factor, certified) = binomial_factor(k, a);
        Ok(Modulus { symbol: symbol.into(), poly: factor, certified_irreducible: certified })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap()
    }

    pub fn is_certified_irreducible(&self) -> bool {
        self.certified_irreducible
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.poly.display(&self.symbol))
    }
}

/// Coefficient field: `Q` itself or `Q[t]/(m)`.
#[derive(Clone, Debug, Default)]
pub struct Field(Option<Arc<Modulus>>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl Field {
    pub fn rationals() -> Self {
        Field(None)
    }

    pub fn extension(m: Modulus) -> Self {
        Field(Some(Arc::new(m)))
    }

    pub fn modulus(&self) -> Option<&Modulus> {
        self.0.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.0.is_none()
    }

    pub fn degree(&self) -> usize {
        self.0.as_ref().map_or(1, |m| m.degree())
    }

    /// Smallest field containing both. Distinct extensions are not combined.
    pub fn join(&self, other: &Field) -> Result<Field, KernelError> {
        match (&self.0, &other.0) {
            (None, _) => Ok(other.clone()),
            (_, None) => Ok(self.clone()),
            _ if self == other => Ok(self.clone()),
            (Some(a), Some(b)) => Err(KernelError::FieldMismatch(a.to_string(), b.to_string())),
        }
    }

    fn join_or_panic(&self, other: &Field) -> Field {
        self.join(other).unwrap_or_else(|e| panic!("{e}"))
    }
}

/// Element of a [`Field`], stored as coefficients of `1, t, …, t^{d-1}`.
#[derive(Clone, Debug)]
pub struct Scalar {
    field: Field,
    coeffs: Vec<Rational>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.field == other.field {
            return self.coeffs == other.coeffs;
        }
        // a rational equals an extension element iff the latter is that constant
        match (self.to_rational(), other.to_rational()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Scalar {
    pub fn zero_in(field: &Field) -> Self {
        Scalar { field: field.clone(), coeffs: vec![Rational::zero(); field.degree()] }
    }

    pub fn one_in(field: &Field) -> Self {
        let mut s = Scalar::zero_in(field);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn zero() -> Self {
        Scalar::zero_in(&Field::rationals())
    }

    pub fn one() -> Self {
        Scalar::one_in(&Field::rationals())
    }

    pub fn rational(q: Rational) -> Self {
        Scalar { field: Field::rationals(), coeffs: vec![q] }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::rational(Rational::from_integer(n.into()))
    }

    /// The class of `t` in `Q[t]/(m)`.
    pub fn generator(field: &Field) -> Self {
        let m = field.modulus().expect("generator of Q requested");
        let poly = UPoly::new(vec![Rational::zero(), Rational::one()]).rem(m.poly());
        Scalar::from_upoly(field, &poly)
    }

    pub fn from_upoly(field: &Field, p: &UPoly) -> Self {
        let reduced = match field.modulus() {
            Some(m) => p.rem(m.poly()),
            None => {
                assert!(p.degree().unwrap_or(0) == 0, "nonconstant polynomial over Q");
                p.clone()
            }
        };
        let mut coeffs = vec![Rational::zero(); field.degree()];
        for (i, c) in reduced.coeffs().iter().enumerate() {
            coeffs[i] = c.clone();
        }
        Scalar { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn to_upoly(&self) -> UPoly {
        UPoly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, when the element lies in the prime field.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-embeds into `field`, which must contain the current field.
    pub fn embed(&self, field: &Field) -> Result<Scalar, KernelError> {
        if &self.field == field {
            return Ok(self.clone());
        }
        match self.to_rational() {
            Some(q) if self.field.is_rational() => {
                let mut s = Scalar::zero_in(field);
                s.coeffs[0] = q;
                Ok(s)
            }
            _ => Err(KernelError::FieldMismatch(
                self.field.modulus().map_or("Q".into(), |m| m.to_string()),
                field.modulus().map_or("Q".into(), |m| m.to_string()),
            )),
        }
    }

    fn promote(&self, field: &Field) -> Scalar {
        self.embed(field).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self.field.modulus() {
            None => Some(Scalar::rational(Rational::one() / &self.coeffs[0])),
            Some(m) => {
                let (g, s) = self.to_upoly().gcd_inverse(m.poly());
                if g.degree() == Some(0) {
                    Some(Scalar::from_upoly(&self.field, &s))
                } else {
                    None
                }
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        Some(self * &other.inv()?)
    }

    /// Integer power; negative exponents need an inverse.
    pub fn pow(&self, e: i64) -> Option<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Scalar::one_in(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn scale(&self, q: &Rational) -> Scalar {
        Scalar { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// True when printing needs parentheses as a coefficient.
    pub fn is_compound(&self) -> bool {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() > 1
    }

    pub fn is_negative_rational(&self) -> bool {
        self.to_rational().is_some_and(|q| q.is_negative())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.to_rational(), self.field.modulus()) {
            (Some(q), _) => f.write_str(&fmt_rat(&q)),
            (None, Some(m)) => f.write_str(&self.to_upoly().display(m.symbol())),
            (None, None) => unreachable!(),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::rational(q)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.field == rhs.field {
            return Scalar {
                field: self.field.clone(),
                coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
            };
        }
        let f = self.field.join_or_panic(&rhs.field);
        &self.promote(&f) + &rhs.promote(&f)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if self.field == rhs.field {
            return Scalar {
                field: self.field.clone(),
                coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
            };
        }
        let f = self.field.join_or_panic(&rhs.field);
        &self.promote(&f) - &rhs.promote(&f)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.field != rhs.field {
            let f = self.field.join_or_panic(&rhs.field);
            // rational times anything is a plain scale
            if self.field.is_rational() {
                return rhs.promote(&f).scale(&self.coeffs[0]);
            }
            if rhs.field.is_rational() {
                return self.promote(&f).scale(&rhs.coeffs[0]);
            }
            return &self.promote(&f) * &rhs.promote(&f);
        }
        match self.field.modulus() {
            None => Scalar::rational(&self.coeffs[0] * &rhs.coeffs[0]),
            Some(_) => {
                let prod = self.to_upoly().mul(&rhs.to_upoly());
                Scalar::from_upoly(&self.field, &prod)
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::{int, rat};
    use proptest::prelude::*;

    fn quartic(a: Rational) -> Field {
        Field::extension(Modulus::new_lenient("c", UPoly::binomial(4, a)).unwrap())
    }

    #[test]
    fn embedding_constant() {
        let f = quartic(rat(3, 4));
        let s = Scalar::rational(rat(3, 4)).embed(&f).unwrap();
        assert_eq!(s.coeffs(), &[rat(3, 4), int(0), int(0), int(0)]);
    }

    #[test]
    fn reduction_by_modulus() {
        let f = quartic(rat(3, 4));
        let c = Scalar::generator(&f);
        let c3 = c.pow(3).unwrap();
        assert_eq!(&c * &c3, Scalar::rational(rat(3, 4)));
        // c^4 + c in Q[c]/(c^4 + 3) is c - 3
        let g = quartic(int(-3));
        let c = Scalar::generator(&g);
        let v = &c.pow(4).unwrap() + &c;
        assert_eq!(v.coeffs(), &[int(-3), int(1), int(0), int(0)]);
        assert_eq!(v.to_string(), "c - 3");
    }

    #[test]
    fn reducible_modulus_rejected_by_default() {
        assert!(matches!(Modulus::new("c", UPoly::binomial(4, rat(-1, 4))), Err(KernelError::ReducibleModulus(_))));
        assert!(Modulus::new_lenient("c", UPoly::binomial(4, rat(-1, 4))).is_ok());
        assert!(Modulus::new("c", UPoly::new(vec![int(1), int(2), int(1)])).is_err());
    }

    #[test]
    fn root_of_splits_reducible_binomial() {
        let m = Modulus::root_of("c", 4, &rat(-1, 4)).unwrap();
        assert_eq!(m.degree(), 2);
        let f = Field::extension(m);
        let c = Scalar::generator(&f);
        assert_eq!(c.pow(4).unwrap(), Scalar::rational(rat(-1, 4)));
    }

    #[test]
    fn inverse() {
        let f = quartic(int(2));
        let x = &Scalar::generator(&f) + &Scalar::one();
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert!(Scalar::zero().inv().is_none());
    }

    fn arb_elem() -> impl Strategy<Value = [i64; 3]> {
        prop::array::uniform3(-6i64..7)
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            // Q[t]/(t^3 - 2) is a field
            let f = Field::extension(Modulus::new("t", UPoly::binomial(3, int(2))).unwrap());
            let mk = |v: [i64; 3]| Scalar::from_upoly(&f, &UPoly::new(v.iter().map(|&x| int(x)).collect()));
            let (a, b, c) = (mk(a), mk(b), mk(c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }
}
