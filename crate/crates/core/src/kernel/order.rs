use std::cmp::Ordering;

use num_traits::{One, Signed};

use super::monomial::Monomial;
use super::rational::{lcm_denominators, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// Weighted degree first, ties broken reverse-lexicographically.
    WeightedRevLex,
    Lex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    kind: OrderKind,
    weights: Vec<Rational>,
    // weights scaled to integers for fast comparison
    scaled: Vec<u64>,
}

impl MonomialOrder {
    /// Total degree reverse-lexicographic.
    pub fn grevlex(nvars: usize) -> Self {
        Self::weighted(vec![Rational::one(); nvars])
    }

    /// Weighted-degree reverse-lexicographic. Weights must be positive.
    pub fn weighted(weights: Vec<Rational>) -> Self {
        assert!(weights.iter().all(|w| w.is_positive()), "weights must be positive");
        let l = Rational::from_integer(lcm_denominators(weights.iter()));
        let scaled = weights.iter().map(|w| u64::try_from((w * &l).to_integer()).expect("weight too large")).collect();
        MonomialOrder { kind: OrderKind::WeightedRevLex, weights, scaled }
    }

    pub fn lex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Lex, weights: vec![Rational::one(); nvars], scaled: vec![1; nvars] }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    fn scaled_degree(&self, m: &Monomial) -> u64 {
        m.exps().iter().zip(&self.scaled).map(|(&e, &w)| e as u64 * w).sum()
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => a.exps().cmp(b.exps()),
            OrderKind::WeightedRevLex => self.scaled_degree(a).cmp(&self.scaled_degree(b)).then_with(|| {
                for (x, y) in a.exps().iter().zip(b.exps()).rev() {
                    if x != y {
                        // smaller exponent in the last differing variable is larger
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::rat;
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.iter().copied())
    }

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::grevlex(3);
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 1, 0]), &m(&[2, 0, 0])), Ordering::Less);
        assert_eq!(o.cmp(&m(&[0, 0, 2]), &m(&[1, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn weighted_uses_weights() {
        let o = MonomialOrder::weighted(vec![rat(1, 2), rat(1, 6)]);
        // x has weight 1/2, y^2 has weight 1/3
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 2])), Ordering::Greater);
        // x vs y^3: equal weight, revlex prefers x
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 3])), Ordering::Greater);
    }

    proptest! {
        #[test]
        fn multiplicative_and_total(a in prop::collection::vec(0u32..5, 3),
                                    b in prop::collection::vec(0u32..5, 3),
                                    w in prop::collection::vec(0u32..5, 3)) {
            let (a, b, w) = (m(&a), m(&b), m(&w));
            for o in [MonomialOrder::grevlex(3), MonomialOrder::lex(3),
                      MonomialOrder::weighted(vec![rat(1, 2), rat(1, 3), rat(1, 5)])] {
                let ab = o.cmp(&a, &b);
                prop_assert_eq!(ab == Ordering::Equal, a == b);
                prop_assert_eq!(o.cmp(&a.mul(&w), &b.mul(&w)), ab);
                prop_assert_ne!(o.cmp(&Monomial::one(3), &a), Ordering::Greater);
            }
        }
    }
}
