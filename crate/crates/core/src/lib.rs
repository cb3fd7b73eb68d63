//! Exact analysis of finite-dimensional dynamical systems over p-adic fields.
//!
//! Inputs are rational. Eigenvalue absolute values come from Newton polygons
//! of characteristic polynomials, invariant subspaces from Hensel slope
//! factorization, and every absolute value is carried as a valuation so that
//! comparisons with thresholds are exact.

pub mod error;
pub mod field;
pub mod polyalg;
pub mod spectral;
pub mod dynamics;
pub mod manifolds;

pub use error::{Error, Result};
