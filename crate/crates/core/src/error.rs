//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical routines.
///
/// Variants split into input-validation failures ([`Error::is_validation`])
/// and numerical failures, which the command-line front end maps to distinct
/// exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The friction matrix does not have a spectrum in the open right half plane.
    #[error("unstable friction matrix: minimum real part of spectrum is {margin:e}")]
    Unstable { margin: f64 },

    /// The friction matrix is stable but too close to the boundary to trust.
    #[error(
        "friction matrix stability margin {margin:e} is below the usable threshold {threshold:e}"
    )]
    NearInstability { margin: f64, threshold: f64 },

    /// A matrix expected to be skew-symmetric is not.
    #[error("matrix is not skew-symmetric: residual {residual:e}")]
    NotSkew { residual: f64 },

    /// A matrix expected to be symmetric positive semidefinite is not.
    #[error("matrix is not symmetric positive semidefinite: {0}")]
    NotPsd(String),

    /// The stationary covariance cannot be inverted.
    #[error("stationary covariance is singular: smallest eigenvalue {min_eigenvalue:e}")]
    SingularCovariance { min_eigenvalue: f64 },

    /// `p - 1` has no inverse modulo `n`.
    #[error("p - 1 = {step} has no inverse modulo N = {n} (gcd is {gcd})")]
    NoInverse { step: usize, n: usize, gcd: usize },

    /// A spectral quantity is undefined because of a degeneracy.
    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    /// The forward Euler step is outside the stability region.
    #[error("step size too large: step * max|eig(B)| = {ratio:.4} must be below 2")]
    StepSize { ratio: f64 },

    /// A complex assembly that must be real left a large imaginary residue.
    #[error("imaginary residue {residue:e} exceeds tolerance in a real-valued assembly")]
    ImaginaryResidue { residue: f64 },

    /// A computation produced NaN or infinite values.
    #[error("non-finite result: {0}")]
    NonFinite(String),

    /// An iterative numerical procedure did not reach its tolerance.
    #[error("numerical procedure did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    /// True for failures caused by invalid arguments rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NotSkew { .. }
                | Error::NotPsd(_)
                | Error::NoInverse { .. }
                | Error::StepSize { .. }
                | Error::Unstable { .. }
        )
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
