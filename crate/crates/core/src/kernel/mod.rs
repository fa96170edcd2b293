//! Exact arithmetic: rationals, simple algebraic extensions, sparse
//! multivariate polynomials and Gröbner bases.

pub mod groebner;
pub mod monomial;
pub mod order;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod univariate;

pub use groebner::{buchberger, ideal_is_unit, GroebnerBasis, StandardMonomials};
pub use monomial::Monomial;
pub use order::{MonomialOrder, OrderKind};
pub use parse::{parse_phase_vectors, parse_polynomial, parse_polynomial_in, ParseError};
pub use poly::{Polynomial, Vars};
pub use rational::{rat, Rational};
pub use scalar::{Field, Modulus, Scalar};
pub use univariate::UPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus {0} is reducible over Q")]
    ReducibleModulus(String),
    #[error("scalars live in different extensions: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
