//! The multivariate Ornstein–Uhlenbeck model `dx = -Bx dt + Σ dW`.
//!
//! This module checks stability of the friction matrix `B`, solves the
//! Lyapunov equation `BS + SBᵀ = 2D` for the stationary covariance with
//! `D = ΣΣᵀ/2`, and assembles the lead matrix `Q = (BS - SBᵀ)/2` either from
//! the solved covariance or, for circulant friction, from the Fourier basis.

use nalgebra::DMatrix;

use crate::circulant::{fourier_basis, CirculantSpec};
use crate::error::{Error, Result};
use crate::lead::{LeadKind, LeadMatrix};
use crate::linalg::{
    min_real_eigenvalue, real_part_checked, require_square, symmetric_eigen, symmetry_residual,
    to_complex, CMat, Mat, C64,
};
use crate::quadrature::integrate_matrix;

/// Smallest stability margin accepted by the covariance solver.
pub const MIN_MARGIN: f64 = 1e-10;

/// Tolerance on the smallest eigenvalue of a positive-semidefinite input.
pub const PSD_TOL: f64 = 1e-12;

/// Friction and volatility of an OU process.
#[derive(Debug, Clone, PartialEq)]
pub struct OuParams {
    friction: Mat,
    volatility: Mat,
}

impl OuParams {
    /// Pairs an `N x N` friction matrix with an `N x M` volatility matrix.
    pub fn new(friction: Mat, volatility: Mat) -> Result<Self> {
        let n = require_square(&friction, "friction matrix")?;
        if volatility.nrows() != n || volatility.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "volatility must have {n} rows and at least one column, got {}x{}",
                volatility.nrows(),
                volatility.ncols()
            )));
        }
        if friction
            .iter()
            .chain(volatility.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidInput("OU parameters must be finite".into()));
        }
        Ok(Self {
            friction,
            volatility,
        })
    }

    /// Friction matrix `B`.
    pub fn friction(&self) -> &Mat {
        &self.friction
    }

    /// Volatility matrix `Σ`.
    pub fn volatility(&self) -> &Mat {
        &self.volatility
    }

    /// Dimension `N`.
    pub fn n(&self) -> usize {
        self.friction.nrows()
    }

    /// Diffusion matrix `D = ΣΣᵀ/2`.
    pub fn diffusion(&self) -> Mat {
        diffusion(&self.volatility)
    }
}

/// Diffusion matrix `ΣΣᵀ/2` of a volatility matrix.
pub fn diffusion(volatility: &Mat) -> Mat {
    (volatility * volatility.transpose()).scale(0.5)
}

/// Outcome of a stability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    /// Whether every eigenvalue of `B` has strictly positive real part.
    pub stable: bool,
    /// Smallest real part over the spectrum of `B`.
    pub margin: f64,
}

/// Checks that `-B` is Hurwitz.
///
/// A margin within roundoff of zero (`64 ε_mach |B|_F`) counts as unstable,
/// so boundary cases such as zero-row-sum circulants are classified exactly.
pub fn check_stability(b: &Mat) -> Result<Stability> {
    require_square(b, "friction matrix")?;
    let margin = min_real_eigenvalue(b);
    let roundoff = 64.0 * f64::EPSILON * b.norm().max(1.0);
    Ok(Stability {
        stable: margin > roundoff,
        margin,
    })
}

fn require_stable(b: &Mat, min_margin: f64) -> Result<f64> {
    let s = check_stability(b)?;
    if !s.stable {
        return Err(Error::Unstable { margin: s.margin });
    }
    if s.margin < min_margin {
        return Err(Error::NearInstability {
            margin: s.margin,
            threshold: min_margin,
        });
    }
    Ok(s.margin)
}

/// Validates that `d` is symmetric positive semidefinite of dimension `n`.
pub fn require_psd(d: &Mat, n: usize, what: &str) -> Result<()> {
    if d.nrows() != n || d.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "{what} must be {n}x{n}, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    let scale = d.norm().max(1.0);
    let asym = symmetry_residual(d);
    if asym > PSD_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "{what} is not symmetric (residual {asym:e})"
        )));
    }
    let (values, _) = symmetric_eigen(d);
    let min = *values.last().expect("non-empty");
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd(format!("{what} has eigenvalue {min:e}")));
    }
    Ok(())
}

/// Solves `T Y + Y Tᴴ = C` for upper-triangular `T` by back substitution
/// over the columns of `Y`.
fn triangular_lyapunov(t: &CMat, c: &CMat) -> CMat {
    let n = t.nrows();
    let mut y = CMat::zeros(n, n);
    for j in (0..n).rev() {
        let mut rhs = c.column(j).clone_owned();
        for k in (j + 1)..n {
            let coeff = t[(j, k)].conj();
            if coeff != C64::new(0.0, 0.0) {
                rhs -= y.column(k) * coeff;
            }
        }
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for l in (i + 1)..n {
                acc -= t[(i, l)] * y[(l, j)];
            }
            y[(i, j)] = acc / (t[(i, i)] + shift);
        }
    }
    y
}

/// Solves `BX + XBᵀ = R` through the complex Schur form of `B`.
fn solve_lyapunov(b: &Mat, rhs: &Mat) -> Result<Mat> {
    let (u, t) = to_complex(b).schur().unpack();
    let c = u.adjoint() * to_complex(rhs) * &u;
    let y = triangular_lyapunov(&t, &c);
    real_part_checked(&(&u * y * u.adjoint()))
}

/// Stationary covariance `S` solving `BS + SBᵀ = 2D`.
///
/// The solve uses the complex Schur decomposition of `B` followed by one step
/// of iterative refinement. Friction matrices with stability margin below
/// [`MIN_MARGIN`] are refused.
pub fn stationary_covariance(b: &Mat, d: &Mat) -> Result<Mat> {
    let n = require_square(b, "friction matrix")?;
    require_psd(d, n, "diffusion matrix")?;
    require_stable(b, MIN_MARGIN)?;
    let rhs = d.scale(2.0);
    let mut s = solve_lyapunov(b, &rhs)?;
    let residual = &rhs - (b * &s + &s * b.transpose());
    s += solve_lyapunov(b, &residual)?;
    let s = (&s + s.transpose()).scale(0.5);
    let residual = (b * &s + &s * b.transpose() - &rhs).norm();
    if residual > 1e-8 * rhs.norm().max(1.0) {
        return Err(Error::NoConvergence(format!(
            "Lyapunov residual {residual:e}"
        )));
    }
    Ok(s)
}

/// Green's function `G(t) = exp(-tB)` of the OU process.
pub fn green_function(b: &Mat, t: f64) -> Result<Mat> {
    require_square(b, "friction matrix")?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    Ok((b * -t).exp())
}

/// Lead matrix `Q = (BS - SBᵀ)/2` of a stationary OU process.
pub fn theoretical_lead_matrix(b: &Mat, d: &Mat) -> Result<LeadMatrix> {
    let s = stationary_covariance(b, d)?;
    lead_from_covariance(b, &s)
}

/// Lead matrix `(BS - SBᵀ)/2` for a given covariance `S`.
pub fn lead_from_covariance(b: &Mat, s: &Mat) -> Result<LeadMatrix> {
    let bs = b * s;
    LeadMatrix::new((&bs - bs.transpose()).scale(0.5), LeadKind::Theoretical)
}

/// Lead matrix of an OU process with circulant friction, assembled from the
/// spectral double sum
/// `Σ_{m,n} (μ_m - μ_n)/(μ_m + μ_n) · w_m w_{N-m}ᵀ D w_{N-n} w_nᵀ`.
pub fn cyclic_lead_matrix(spec: &CirculantSpec, d: &Mat) -> Result<LeadMatrix> {
    let n = spec.n();
    require_psd(d, n, "diffusion matrix")?;
    let mu: Vec<C64> = (1..=n).map(|k| spec.eigenvalue(k)).collect();
    let margin = mu.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let roundoff = 64.0 * f64::EPSILON * spec.dense().norm().max(1.0);
    if margin <= roundoff {
        return Err(Error::Unstable { margin });
    }
    let w = fourier_basis(n);
    let projected = w.adjoint() * to_complex(d) * w.conjugate();
    let coefficients = DMatrix::from_fn(n, n, |i, j| {
        (mu[i] - mu[j]) / (mu[i] + mu[j]) * projected[(i, j)]
    });
    let q = real_part_checked(&(&w * coefficients * w.transpose()))?;
    LeadMatrix::new(q, LeadKind::ClosedForm)
}

/// Auto-covariance `Γ(s, t)` of the process started from its stationary law:
/// `G(s) S G(t)ᵀ + 2 ∫₀^{min(s,t)} G(s-u) D G(t-u)ᵀ du`, integrated by
/// composite Gauss–Legendre quadrature.
pub fn autocovariance(params: &OuParams, s: f64, t: f64) -> Result<Mat> {
    if !(s >= 0.0 && t >= 0.0) || !s.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "times must be finite and non-negative, got ({s}, {t})"
        )));
    }
    let b = params.friction();
    let d = params.diffusion();
    let cov = stationary_covariance(b, &d)?;
    let initial = green_function(b, s)? * cov * green_function(b, t)?.transpose();
    let upper = s.min(t);
    let integral = integrate_matrix(
        |u| (-(b * (s - u))).exp() * &d * (-(b * (t - u))).exp().transpose(),
        0.0,
        upper,
        1e-12,
    )?;
    Ok(initial + integral * 2.0)
}

/// Coefficient `-Q S⁻¹` multiplying `x P(x, t)` in the stationary
/// probability flux.
pub fn flux_coefficient(b: &Mat, d: &Mat) -> Result<Mat> {
    let s = stationary_covariance(b, d)?;
    let q = lead_from_covariance(b, &s)?.into_matrix();
    let (values, _) = symmetric_eigen(&s);
    let min = *values.last().expect("non-empty");
    let max = values[0];
    if min.partial_cmp(&(1e-12 * max.max(f64::MIN_POSITIVE))) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::SingularCovariance {
            min_eigenvalue: min,
        });
    }
    let chol = s.clone().cholesky().ok_or(Error::SingularCovariance {
        min_eigenvalue: min,
    })?;
    let x_t = chol.solve(&q.transpose());
    Ok(-x_t.transpose())
}
