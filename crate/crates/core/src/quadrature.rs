//! Gauss–Legendre quadrature for matrix-valued integrands.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            derivative = dp;
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        if dp.is_finite() {
            derivative = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre integral of a matrix-valued function over `[a, b]`.
///
/// The panel count doubles until two successive estimates differ by less
/// than `rel_tol * max(1, |estimate|_F)`.
pub fn integrate_matrix<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Mat>
where
    F: Fn(f64) -> Mat,
{
    const ORDER: usize = 16;
    const MAX_PANELS: usize = 1 << 14;
    let (nodes, weights) = gauss_legendre(ORDER);
    let composite = |panels: usize| -> Mat {
        let h = (b - a) / panels as f64;
        let mut total: Option<Mat> = None;
        for k in 0..panels {
            let left = a + h * k as f64;
            for (x, w) in nodes.iter().zip(&weights) {
                let t = left + 0.5 * h * (x + 1.0);
                let term = f(t) * (0.5 * h * w);
                total = Some(match total {
                    Some(acc) => acc + term,
                    None => term,
                });
            }
        }
        total.expect("at least one panel")
    };
    if a == b {
        return Ok(f(a) * 0.0);
    }
    let mut panels = 1;
    let mut previous = composite(panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let current = composite(panels);
        if (&current - &previous).norm() <= rel_tol * current.norm().max(1.0) {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::NoConvergence(format!(
        "quadrature did not reach relative tolerance {rel_tol:e} with {MAX_PANELS} panels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        for degree in 0..16 {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(degree)).sum();
            let exact = if degree % 2 == 1 {
                0.0
            } else {
                2.0 / (degree as f64 + 1.0)
            };
            assert!((approx - exact).abs() < 1e-14, "degree {degree}");
        }
    }

    #[test]
    fn odd_order_has_a_node_at_zero() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_integral_of_exponential() {
        let r = integrate_matrix(|t| Mat::from_element(1, 1, (-t).exp()), 0.0, 3.0, 1e-13).unwrap();
        assert!((r[(0, 0)] - (1.0 - (-3.0f64).exp())).abs() < 1e-13);
    }
}
