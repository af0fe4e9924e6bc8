//! Pluggable coefficient-function rings for chart functions.
//!
//! A [`CoeffRing`] supplies exact arithmetic, a commuting family of partial
//! derivatives satisfying Leibniz, and optional integration. Three rings are
//! bundled:
//!
//! - [`jet::JetRing`]: truncated polynomials around a base point (flat charts),
//! - [`trig::TrigRing`]: trigonometric polynomials on the torus Tⁿ,
//! - [`profile::ProfileRing`]: rational functions of the moment coordinate z
//!   on the toric S² model.
//!
//! All elements are immutable values; every operation is a pure function.

pub mod jet;
pub mod profile;
pub mod trig;

use crate::error::Result;
use crate::scalar::{Rat, Scalar};
use std::fmt::Debug;

/// A commutative coefficient ring over the exact scalar tower, with partial
/// derivatives along the chart coordinates.
pub trait CoeffRing: Clone + PartialEq + Debug {
    type Elem: Clone + PartialEq + Debug;

    /// Number of chart coordinates.
    fn dim(&self) -> usize;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Embed an exact scalar as a constant function.
    fn scalar(&self, s: &Scalar) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiply by an exact scalar.
    fn scale(&self, s: &Scalar, a: &Self::Elem) -> Self::Elem;

    /// Exact partial derivative along coordinate `i`.
    fn derivative(&self, a: &Self::Elem, i: usize) -> Result<Self::Elem>;

    /// Exact division a/b where the ring supports it (always for rational
    /// functions; only by invertible constants for polynomial/trig rings).
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Deterministic human-readable rendering.
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn rat(&self, q: &Rat) -> Self::Elem {
        self.scalar(&Scalar::from_rat(q.clone()))
    }

    fn scale_rat(&self, q: &Rat, a: &Self::Elem) -> Self::Elem {
        self.scale(&Scalar::from_rat(q.clone()), a)
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.scalar(&Scalar::from_int(n))
    }
}

/// Rings whose elements can be integrated exactly over the whole model.
///
/// `integrate_dV` is the integral against the coordinate volume `dx¹⋯dxⁿ`
/// (not yet weighted by ω^m/m!; on the bundled models that weight is 1).
pub trait ExactIntegrate: CoeffRing {
    fn integrate_dv(&self, a: &Self::Elem) -> Result<Scalar>;
}
