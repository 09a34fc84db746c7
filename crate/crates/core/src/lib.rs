//! Numerical tools for Dirichlet-type spaces on the unit disc.
//!
//! The crate computes weighted Dirichlet and bidisc Bergman norms,
//! evaluates the De Branges-Rovnyak kernel of a self-map of the disc,
//! estimates its supremum, and checks the chain of inequalities showing
//! that a bounded kernel yields a bounded composition operator on `D_p`.

// `!(x > a)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexfn;
pub mod error;
pub mod kernels;
pub mod norms;
pub mod operators;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;
