//! Exact construction of semiclassical orthogonal polynomials and their Sobolev
//! companions over the continuous, discrete (Δ/∇) and q-Hahn operator families,
//! together with exact checks of the algebraic identities linking them.

pub mod error;
pub mod families;
pub mod functional;
pub mod jop;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod sobolev;
pub mod standard_ops;
pub mod structure;
pub mod suites;

pub use error::{Error, Result};
pub use lattice::{OperatorFamily, Poly};
pub use scalar::Scalar;
