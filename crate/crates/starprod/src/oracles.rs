//! Independent reference computations used by the verification suites.
//!
//! Everything here is deliberately written against the chart data directly,
//! bypassing the Weyl-bundle machinery, so that agreement with the Fedosov
//! recursion is a genuine two-route check rather than a tautology.

use crate::error::Result;
use crate::ring::CoeffRing;
use crate::scalar::{rat, Rat};
use crate::series::NuSeries;

/// The Weyl-rule (Moyal) star product computed directly on functions:
/// f ∗ g = Σ_t (ν/2)^t/t! · Λ^{i₁j₁}…Λ^{i_tj_t} ∂^t f ∂^t g.
pub fn moyal_star<R: CoeffRing>(
    ring: &R,
    lambda: &[Vec<R::Elem>],
    f: &R::Elem,
    g: &R::Elem,
    max_order: u32,
) -> Result<NuSeries<R::Elem>> {
    let n = lambda.len();
    let mut out = NuSeries::new();
    // stage: list of (coefficient, f-derivative, g-derivative) products
    let mut stage: Vec<(R::Elem, R::Elem)> = vec![(f.clone(), g.clone())];
    let mut factor = Rat::from_integer(1.into()); // (1/2)^t / t!
    for t in 0..=max_order {
        let mut coeff_t = ring.zero();
        for (a, b) in &stage {
            coeff_t = ring.add(&coeff_t, &ring.mul(a, b));
        }
        coeff_t = ring.scale_rat(&factor, &coeff_t);
        if !ring.is_zero(&coeff_t) {
            out.set(t as i32, coeff_t);
        }
        if t == max_order {
            break;
        }
        let mut next = Vec::new();
        for (a, b) in &stage {
            for i in 0..n {
                for j in 0..n {
                    if ring.is_zero(&lambda[i][j]) {
                        continue;
                    }
                    let da = ring.mul(&lambda[i][j], &ring.derivative(a, i)?);
                    if ring.is_zero(&da) {
                        continue;
                    }
                    let db = ring.derivative(b, j)?;
                    if ring.is_zero(&db) {
                        continue;
                    }
                    next.push((da, db));
                }
            }
        }
        stage = next;
        factor = factor / rat(2 * (t as i64 + 1), 1);
        if stage.is_empty() {
            break;
        }
    }
    Ok(out.normalize_ring(ring))
}
