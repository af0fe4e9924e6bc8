//! Gauss–Legendre quadrature on [-1, 1] with an order-doubling convergence
//! check. Used only where exact integration is impossible (rational-function
//! integrands on the S² model); the algebraic core never sees a float.

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on Pₙ with the standard Chebyshev-flavored initial guess;
/// accurate to machine precision for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫_{-1}^{1} f(z) dz with the n-point rule.
pub fn integrate_order(f: &dyn Fn(f64) -> f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    nodes.iter().zip(&weights).map(|(&x, &w)| w * f(x)).sum()
}

/// ∫_{-1}^{1} f(z) dz, doubling the order until two consecutive values agree
/// within `tol` (relative to max(1, |value|)). Divergence under doubling
/// signals a genuinely singular integrand and is reported as an error.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, start_order: usize, tol: f64) -> Result<f64> {
    let mut order = start_order.max(4);
    let mut prev = integrate_order(f, order);
    for _ in 0..8 {
        order *= 2;
        let cur = integrate_order(f, order);
        let delta = (cur - prev).abs();
        if delta <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureDiverged {
        order,
        value: prev,
        delta: (integrate_order(f, order * 2) - prev).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        // degree d is integrated exactly by ceil((d+1)/2) nodes
        for d in 0..12usize {
            let n = d.div_ceil(2).max(1);
            let f = move |x: f64| x.powi(d as i32);
            let got = integrate_order(&f, n.max((d + 1).div_ceil(2)));
            let want = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "degree {d}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn adaptive_converges_on_smooth_rational() {
        let f = |x: f64| 1.0 / (2.0 + x);
        let got = integrate_adaptive(&f, 4, 1e-12).unwrap();
        assert!((got - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn adaptive_flags_singular_integrand() {
        // non-integrable pole inside the interval
        let f = |x: f64| 1.0 / (x - 0.3);
        assert!(integrate_adaptive(&f, 4, 1e-12).is_err());
    }
}
