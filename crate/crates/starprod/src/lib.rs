//! Exact-arithmetic Fedosov star products on chart-based symplectic models.
//!
//! The crate builds the Fedosov construction order by order over pluggable
//! coefficient rings, computes trace densities and quantum moment maps, and
//! turns the invariance and vanishing statements of the underlying theory
//! into executable checks. The algebraic core is exact (arbitrary-precision
//! rationals with a tracked 2π symbol); floating point appears only in the
//! Gauss–Legendre quadrature used for genuinely rational integrands on the
//! toric S² model.

pub mod error;
pub mod fedosov;
pub mod geometry;
pub mod oracles;
pub mod quad;
pub mod ring;
pub mod scalar;
pub mod series;
pub mod weyl;

pub use error::{Error, Result};

#[cfg(test)]
mod fedosov_tests;
