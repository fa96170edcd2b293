//! Dense univariate polynomials over Q, used for extension moduli.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rat, int, lcm_denominators, prime_factors, rational_root, Rational};

/// Coefficients stored lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        UPoly::new(vec![c])
    }

    /// `t^k - a`
    pub fn binomial(k: usize, a: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[0] = -a;
        coeffs[k] = Rational::one();
        UPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => UPoly::new(self.coeffs.iter().map(|c| c / lc).collect()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        UPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = rem[top].clone() / &lc;
            if !c.is_zero() {
                let shift = top - dd;
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] -= &c * d;
                }
                quot[shift] = c;
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s)` with `s * self ≡ g (mod modulus)` and `g = gcd(self, modulus)` monic.
    pub fn gcd_inverse(&self, modulus: &Self) -> (Self, Self) {
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (UPoly::zero(), UPoly::constant(Rational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let lc = r0.leading().cloned().unwrap_or_else(Rational::one);
        (r0.monic(), s0.scale(&(Rational::one() / lc)).rem(modulus))
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    pub fn is_square_free(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Square-free part (monic), valid in characteristic zero.
    pub fn square_free_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// All distinct rational roots, ascending, by the rational root test.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut poly = self.clone();
        // factor out t^k
        if poly.coeffs[0].is_zero() {
            roots.push(Rational::zero());
            let k = poly.coeffs.iter().take_while(|c| c.is_zero()).count();
            poly = UPoly::new(poly.coeffs[k..].to_vec());
        }
        if poly.degree().unwrap_or(0) > 0 {
            let l = lcm_denominators(poly.coeffs.iter());
            let ints: Vec<BigInt> =
                poly.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
            let a0 = ints[0].abs();
            let an = ints.last().unwrap().abs();
            if let (Some(ps), Some(qs)) = (small_divisors(&a0), small_divisors(&an)) {
                for p in &ps {
                    for q in &qs {
                        for sign in [1i64, -1] {
                            let cand = Rational::new(BigInt::from(*p) * sign, BigInt::from(*q));
                            if poly.eval(&cand).is_zero() && !roots.contains(&cand) {
                                roots.push(cand);
                            }
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Checks whether the polynomial is `t^k - a` up to a scalar; returns `(k, a)`.
    pub fn as_binomial(&self) -> Option<(usize, Rational)> {
        let m = self.monic();
        let k = m.degree()?;
        if k == 0 {
            return None;
        }
        if m.coeffs[1..k].iter().all(|c| c.is_zero()) {
            Some((k, -m.coeffs[0].clone()))
        } else {
            None
        }
    }

    pub fn display(&self, symbol: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let power = match i {
                0 => String::new(),
                1 => symbol.to_string(),
                _ => format!("{symbol}^{i}"),
            };
            if power.is_empty() {
                out.push_str(&fmt_rat(&abs));
            } else if abs.is_one() {
                out.push_str(&power);
            } else {
                out.push_str(&format!("{}*{}", fmt_rat(&abs), power));
            }
        }
        out
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display("t"))
    }
}

fn small_divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n: u64 = n.try_into().ok()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    Some(out)
}

/// Irreducibility over Q of `t^k - a` (Capelli's criterion).
pub fn binomial_is_irreducible(k: usize, a: &Rational) -> bool {
    if a.is_zero() {
        return k == 1;
    }
    for p in prime_factors(k as u64) {
        if rational_root(a, p as u32).is_some() {
            return false;
        }
    }
    if k.is_multiple_of(4) && rational_root(&(-a / int(4)), 4).is_some() {
        return false;
    }
    true
}

/// An irreducible-where-certifiable factor of `t^k - a`, `a ≠ 0`.
///
/// Returns the factor and whether its irreducibility is certified. Splits along
/// `t^k - b^p = (t^{k/p} - b)(…)` and `X^4 + 4b^4 = (X^2 - 2bX + 2b^2)(X^2 + 2bX + 2b^2)`.
pub fn binomial_factor(k: usize, a: &Rational) -> (UPoly, bool) {
    assert!(!a.is_zero() && k >= 1);
    if k == 1 {
        return (UPoly::binomial(1, a.clone()), true);
    }
    for p in prime_factors(k as u64) {
        if let Some(b) = rational_root(a, p as u32) {
            return binomial_factor(k / p as usize, &b);
        }
    }
    if k.is_multiple_of(4) {
        if let Some(b) = rational_root(&(-a / int(4)), 4) {
            let b = b.abs();
            let q = k / 4;
            let mut coeffs = vec![Rational::zero(); 2 * q + 1];
            coeffs[0] = int(2) * &b * &b;
            coeffs[q] = int(-2) * &b;
            coeffs[2 * q] = Rational::one();
            let f = UPoly::new(coeffs);
            // a quadratic with negative discriminant is certainly irreducible
            let certified = q == 1;
            return (f, certified);
        }
    }
    (UPoly::binomial(k, a.clone()), true)
}

/// Best-effort irreducibility certificate: degree ≤ 3 via rational roots,
/// binomials via Capelli. `None` when undecided.
pub fn certify_irreducible(p: &UPoly) -> Option<bool> {
    let d = p.degree()?;
    if d == 0 {
        return Some(false);
    }
    if d == 1 {
        return Some(true);
    }
    if let Some((k, a)) = p.as_binomial() {
        return Some(binomial_is_irreducible(k, &a));
    }
    if d <= 3 {
        return Some(p.rational_roots().is_empty());
    }
    if !p.rational_roots().is_empty() {
        return Some(false);
    }
    None
}
