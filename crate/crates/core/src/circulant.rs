//! Circulant matrices and their exact spectral machinery.
//!
//! A circulant matrix is fixed by its first row `(c_1, ..., c_N)`; entry
//! `(m, n)` equals `c_{n-m+1}` with the index reduced into `1..=N`. Every
//! circulant matrix is diagonalised by the discrete Fourier basis
//! `w_n = (1, ω_n, ω_n², ..., ω_n^{N-1}) / √N` with `ω_n = exp(2πi n / N)`,
//! and its eigenvalues are `μ_n = Σ_p c_p ω_n^{p-1}`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index::wrap;
use crate::linalg::{real_part_checked, CMat, CVec, Mat, C64};

/// A circulant matrix described by its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec {
    first_row: Vec<f64>,
}

impl CirculantSpec {
    /// Builds a circulant description from `(c_1, ..., c_N)`.
    pub fn new(first_row: Vec<f64>) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::InvalidInput(
                "circulant first row must be non-empty".into(),
            ));
        }
        if first_row.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "circulant first row must be finite".into(),
            ));
        }
        Ok(Self { first_row })
    }

    /// Dimension `N`.
    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    /// The coefficients `(c_1, ..., c_N)`.
    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    /// Coefficient `c_p` for a one-based index taken mod `N`.
    pub fn coefficient(&self, p: i64) -> f64 {
        self.first_row[wrap(p, self.n()) - 1]
    }

    /// Dense materialisation with entry `(m, n) = c_{n-m+1}`.
    pub fn dense(&self) -> Mat {
        let n = self.n();
        Mat::from_fn(n, n, |i, j| self.coefficient(j as i64 - i as i64 + 1))
    }

    /// Negated circulant `Circ(-c_1, ..., -c_N)`.
    pub fn negated(&self) -> Self {
        Self {
            first_row: self.first_row.iter().map(|c| -c).collect(),
        }
    }

    /// Eigenvalue `μ_n = Σ_p c_p ω_n^{p-1}`.
    pub fn eigenvalue(&self, n: usize) -> C64 {
        let big_n = self.n();
        self.first_row
            .iter()
            .enumerate()
            .map(|(p, &c)| root_power(n as i64, p as i64, big_n) * c)
            .sum()
    }
}

/// One Fourier eigenpair of a circulant matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    /// One-based mode index `n`.
    pub index: usize,
    /// Root of unity `ω_n`.
    pub root: C64,
    /// Unit eigenvector `w_n`.
    pub eigenvector: CVec,
    /// Eigenvalue `μ_n`.
    pub eigenvalue: C64,
}

/// `ω_n^k = exp(2πi n k / N)` with `n k` reduced mod `N` before the
/// trigonometric evaluation to keep the phase exact.
pub fn root_power(n: i64, k: i64, big_n: usize) -> C64 {
    let r = (n as i128 * k as i128).rem_euclid(big_n as i128) as f64;
    C64::from_polar(1.0, TAU * r / big_n as f64)
}

/// Fourier basis vector `w_n` with components `ω_n^{k-1} / √N`.
pub fn fourier_vector(n: usize, big_n: usize) -> CVec {
    let scale = 1.0 / (big_n as f64).sqrt();
    CVec::from_fn(big_n, |k, _| root_power(n as i64, k as i64, big_n) * scale)
}

/// Matrix whose column `n - 1` is `w_n`, for `n = 1..=N`.
pub fn fourier_basis(big_n: usize) -> CMat {
    let scale = 1.0 / (big_n as f64).sqrt();
    CMat::from_fn(big_n, big_n, |k, n| {
        root_power(n as i64 + 1, k as i64, big_n) * scale
    })
}

/// Assembles `Σ_{m,n} C_{m,n} w_m w_nᵀ` for a coefficient matrix indexed by
/// zero-based `(m - 1, n - 1)`.
pub fn fourier_bilinear_sum(coefficients: &CMat) -> CMat {
    let w = fourier_basis(coefficients.nrows());
    &w * coefficients * w.transpose()
}

/// Full eigensystem of a circulant matrix, one mode per `n = 1..=N`.
pub fn circulant_eigensystem(spec: &CirculantSpec) -> Vec<FourierMode> {
    let big_n = spec.n();
    (1..=big_n)
        .map(|n| FourierMode {
            index: n,
            root: root_power(n as i64, 1, big_n),
            eigenvector: fourier_vector(n, big_n),
            eigenvalue: spec.eigenvalue(n),
        })
        .collect()
}

/// Matrix exponential `exp(tA)` of a circulant matrix via
/// `Σ_n e^{μ_n t} w_n w_{N-n}ᵀ`.
pub fn circulant_exp(spec: &CirculantSpec, t: f64) -> Result<Mat> {
    if !t.is_finite() {
        return Err(Error::InvalidInput("time must be finite".into()));
    }
    let big_n = spec.n();
    let diag = DMatrix::from_fn(big_n, big_n, |i, j| {
        if i == j {
            (spec.eigenvalue(i + 1) * t).exp()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let w = fourier_basis(big_n);
    real_part_checked(&(&w * diag * w.adjoint()))
}
