//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use cyclicity_core::circulant::CirculantSpec;
use cyclicity_core::linalg::{Mat, C64};
use cyclicity_core::quadrature::gauss_legendre;
use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic uniform and matrix generator for tests.
pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, lo: f64, hi: f64) -> Mat {
        Mat::from_fn(rows, cols, |_, _| self.uniform(lo, hi))
    }

    pub fn skew(&mut self, n: usize) -> Mat {
        let m = self.matrix(n, n, -1.0, 1.0);
        &m - m.transpose()
    }

    pub fn psd(&mut self, n: usize) -> Mat {
        let m = self.matrix(n, n, -1.0, 1.0);
        &m * m.transpose() * 0.5
    }

    /// Stable circulant friction with nonpositive off-diagonal coefficients
    /// and stability margin in `[0.2, 1.2]`.
    pub fn stable_circulant(&mut self, n: usize) -> CirculantSpec {
        let mut row: Vec<f64> = (0..n).map(|_| -self.uniform(0.0, 1.0)).collect();
        let off: f64 = row[1..].iter().sum();
        row[0] = -off + self.uniform(0.2, 1.2);
        CirculantSpec::new(row).unwrap()
    }
}

/// Truncated exponential series `Σ_{k ≤ terms} (tA)^k / k!`.
pub fn exp_series(a: &Mat, t: f64, terms: usize) -> Mat {
    let n = a.nrows();
    let mut term = Mat::identity(n, n);
    let mut total = term.clone();
    for k in 1..=terms {
        term = &term * a * (t / k as f64);
        total += &term;
    }
    total
}

/// Exponential by scaling and squaring of the power series, for arguments of
/// large norm.
pub fn exp_scaled_series(a: &Mat, t: f64) -> Mat {
    let norm = (a * t).norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let mut e = exp_series(a, t / 2f64.powi(squarings as i32), 30);
    for _ in 0..squarings {
        e = &e * &e;
    }
    e
}

/// Lyapunov solve by Kronecker vectorisation:
/// `(I ⊗ B + B ⊗ I) vec(S) = 2 vec(D)`.
pub fn lyapunov_kronecker(b: &Mat, d: &Mat) -> Mat {
    let n = b.nrows();
    let id = Mat::identity(n, n);
    let big = id.kronecker(b) + b.kronecker(&id);
    let rhs = nalgebra::DVector::from_column_slice((d * 2.0).as_slice());
    let sol = big.lu().solve(&rhs).expect("nonsingular Kronecker system");
    Mat::from_column_slice(n, n, sol.as_slice())
}

/// `2 ∫₀^∞ G(t) D G(t)ᵀ dt` by composite Gauss–Legendre on `[0, T*]` with
/// `|G(T*)|_F < 1e-14`, doubling panels until successive estimates agree to
/// `1e-10` relative. `G` comes from the scaled power series.
pub fn covariance_quadrature(b: &Mat, d: &Mat) -> Mat {
    let mut horizon = 1.0;
    while exp_scaled_series(&(-b), horizon).norm() >= 1e-14 {
        horizon *= 2.0;
    }
    let (x, w) = gauss_legendre(12);
    let estimate = |panels: usize| {
        let h = horizon / panels as f64;
        let step = exp_scaled_series(&(-b), h);
        let mut left = Mat::identity(b.nrows(), b.nrows());
        let local: Vec<Mat> = x
            .iter()
            .map(|xi| exp_scaled_series(&(-b), 0.5 * h * (xi + 1.0)))
            .collect();
        let mut total = Mat::zeros(b.nrows(), b.nrows());
        for _ in 0..panels {
            for (g_local, wi) in local.iter().zip(&w) {
                let g = &left * g_local;
                total += &g * d * g.transpose() * (0.5 * h * wi);
            }
            left = &left * &step;
        }
        total * 2.0
    };
    let mut panels = 8;
    let mut previous = estimate(panels);
    loop {
        panels *= 2;
        let current = estimate(panels);
        if (&current - &previous).norm() < 1e-10 * current.norm() || panels > 1 << 12 {
            return current;
        }
        previous = current;
    }
}

/// Characteristic polynomial coefficients `c_0 .. c_n` (monic, `c_n = 1`) by
/// the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &Mat) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = Mat::zeros(n, n);
    let id = Mat::identity(n, n);
    for k in 1..=n {
        m = a * &m + &id * coeffs[n - k + 1];
        coeffs[n - k] = -(a * &m).trace() / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let eval = |z: C64| {
        coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let denom: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| roots[i] - roots[j])
                .product();
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Entry-wise maximum absolute difference.
pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).amax()
}

/// Dense permutation matrix sending basis vector `j` to `perm[j]` (zero-based).
pub fn permutation_matrix(perm: &[usize]) -> Mat {
    let n = perm.len();
    let mut p = DMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        p[(i, j)] = 1.0;
    }
    p
}

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
