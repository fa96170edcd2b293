//! Exact computations for Landau–Ginzburg orbifold B-models: quasihomogeneous
//! polynomial analysis, diagonal symmetry groups, Milnor rings, orbifolded
//! Frobenius algebras and certified isomorphisms between them.

pub mod error;
pub mod exec;
pub mod kernel;
pub mod linalg;

pub use error::{Error, ErrorClass, Result};
pub use exec::Exec;
pub mod algebra;
pub mod equivalence;
pub mod isomorphism;
pub mod milnor;
pub mod orbifold;
pub mod selftest;
pub mod structure;
pub mod symmetry;
