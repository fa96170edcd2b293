use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical representative of `q mod 1` in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

pub fn is_integer(q: &Rational) -> bool {
    q.is_integer()
}

/// `p/q` text, or a bare integer when the denominator is one.
pub fn fmt_rat(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub struct DisplayRat<'a>(pub &'a Rational);

impl fmt::Display for DisplayRat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rat(self.0))
    }
}

/// Parses `int` or `int/posint` (optionally signed, surrounding whitespace allowed).
pub fn parse_rat(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if !den.is_positive() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Exact `p`-th root of a rational, when one exists.
pub fn rational_root(q: &Rational, p: u32) -> Option<Rational> {
    if q.is_zero() {
        return Some(Rational::zero());
    }
    if q.is_negative() && p.is_multiple_of(2) {
        return None;
    }
    let root_int = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(p);
        if num_traits::pow(r.clone(), p as usize) == n.abs() {
            Some(if n.is_negative() { -r } else { r })
        } else {
            None
        }
    };
    let n = root_int(q.numer())?;
    let d = root_int(q.denom())?;
    Some(Rational::new(n, d))
}

pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_is_canonical() {
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert_eq!(frac(&rat(5, 2)), rat(1, 2));
        assert_eq!(frac(&int(3)), int(0));
    }

    #[test]
    fn roots() {
        assert_eq!(rational_root(&rat(1, 16), 4), Some(rat(1, 2)));
        assert_eq!(rational_root(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(rational_root(&rat(-1, 4), 2), None);
        assert_eq!(rational_root(&int(2), 2), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat(" -3/6 "), Some(rat(-1, 2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("1/-2"), None);
        assert_eq!(fmt_rat(&rat(6, 3)), "2");
        assert_eq!(fmt_rat(&rat(-3, 4)), "-3/4");
    }
}
