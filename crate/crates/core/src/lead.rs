//! The lead matrix: a real skew-symmetric matrix of pairwise oriented areas.

use crate::error::{Error, Result};
use crate::linalg::{skew_residual, Mat};

/// How a lead matrix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeadKind {
    /// `(BS - SBᵀ)/2` from a solved Lyapunov equation.
    Theoretical,
    /// An explicit spectral formula for a structured model.
    ClosedForm,
    /// A limiting expansion in a regime of the perturbation parameter.
    Asymptotic,
    /// Accumulated oriented areas of sampled data.
    Empirical,
}

impl LeadKind {
    /// Lower-case label used in tabular output.
    pub fn label(self) -> &'static str {
        match self {
            LeadKind::Theoretical => "theoretical",
            LeadKind::ClosedForm => "closed-form",
            LeadKind::Asymptotic => "asymptotic",
            LeadKind::Empirical => "empirical",
        }
    }
}

/// Relative tolerance on `|Q + Qᵀ|_F` accepted by [`LeadMatrix::new`].
pub const SKEW_TOL: f64 = 1e-10;

/// A validated real skew-symmetric lead matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadMatrix {
    matrix: Mat,
    kind: LeadKind,
}

impl LeadMatrix {
    /// Validates skew-symmetry to `SKEW_TOL * max(1, |Q|_F)` and stores the
    /// exactly skew-symmetric projection `(Q - Qᵀ)/2`.
    pub fn new(matrix: Mat, kind: LeadKind) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidInput(format!(
                "lead matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(
                "lead matrix has non-finite entries".into(),
            ));
        }
        let residual = skew_residual(&matrix);
        if residual > SKEW_TOL * matrix.norm().max(1.0) {
            return Err(Error::NotSkew { residual });
        }
        let projected = (&matrix - matrix.transpose()).scale(0.5);
        Ok(Self {
            matrix: projected,
            kind,
        })
    }

    /// The matrix entries.
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// Consumes the wrapper and returns the matrix.
    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    /// Origin of the matrix.
    pub fn kind(&self) -> LeadKind {
        self.kind
    }

    /// Dimension `N`.
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_skew_and_rejects_symmetric() {
        let q = Mat::from_row_slice(2, 2, &[0.0, 1.5, -1.5, 0.0]);
        let lead = LeadMatrix::new(q.clone(), LeadKind::Theoretical).unwrap();
        assert_eq!(lead.matrix(), &q);
        let s = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            LeadMatrix::new(s, LeadKind::Empirical),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn projection_removes_roundoff() {
        let q = Mat::from_row_slice(2, 2, &[1e-14, 2.0, -2.0 + 1e-13, 0.0]);
        let lead = LeadMatrix::new(q, LeadKind::ClosedForm).unwrap();
        assert_eq!(skew_residual(lead.matrix()), 0.0);
    }
}
