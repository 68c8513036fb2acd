//! Spectral analysis of skew-symmetric lead matrices.
//!
//! The spectrum of a real skew-symmetric matrix `A` consists of zero and
//! conjugate pairs `±iκ`. It is obtained from the Hermitian matrix `iA`: an
//! eigenpair `(h, v)` of `iA` is an eigenpair `(-ih, v)` of `A`. The leading
//! eigenvalue `λ1` is the member of the largest pair with positive imaginary
//! part, and its eigenvector is normalised so that its largest-modulus
//! component is real and positive (ties go to the lowest index).

use std::f64::consts::{PI, TAU};

use nalgebra::{ComplexField, DMatrix, DVector, Scalar};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, require_square, skew_residual, to_complex, CMat, CVec, Mat, C64,
};

/// Tolerance on `|A + Aᵀ|_F` accepted by [`skew_eigendecomposition`].
pub const SKEW_INPUT_TOL: f64 = 1e-8;

/// Relative tolerance used to detect ties among component moduli.
const MODULUS_TIE_TOL: f64 = 1e-12;

/// Eigen-analysis of a real skew-symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewSpectrum {
    /// Eigenvalues sorted by modulus, each conjugate pair listed with the
    /// positive imaginary member first.
    pub eigenvalues: Vec<C64>,
    /// Unit eigenvectors, column `k` belonging to `eigenvalues[k]`.
    pub eigenvectors: CMat,
    /// Phase-normalised unit eigenvector of `eigenvalues[0]`.
    pub leading_eigenvector: CVec,
    /// Principal arguments of the leading eigenvector components in `(-π, π]`.
    pub phases: Vec<f64>,
    /// Moduli of the leading eigenvector components.
    pub moduli: Vec<f64>,
}

impl SkewSpectrum {
    /// The leading eigenvalue `λ1`.
    pub fn leading_eigenvalue(&self) -> C64 {
        self.eigenvalues[0]
    }

    /// Ratio `|λ1/λ3|`, or `+∞` when `|λ3| < 1e-14 |λ1|`.
    pub fn ratio(&self) -> Result<f64> {
        if self.eigenvalues.len() < 3 {
            return Err(Error::InvalidInput("eigenvalue ratio needs N >= 3".into()));
        }
        let l1 = self.eigenvalues[0].norm();
        let l3 = self.eigenvalues[2].norm();
        if l1 == 0.0 {
            return Err(Error::Degenerate(
                "zero matrix has no leading eigenvalue".into(),
            ));
        }
        if l3 < 1e-14 * l1 {
            return Ok(f64::INFINITY);
        }
        Ok(l1 / l3)
    }
}

/// Applies the phase convention: the component of largest modulus (lowest
/// index among ties) becomes real and positive.
pub fn normalize_phase(v: &CVec) -> CVec {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v.clone();
    }
    let k = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - MODULUS_TIE_TOL))
        .expect("maximum exists");
    let rotation = v[k].conj() / v[k].norm();
    let mut out = v * rotation;
    out[k] = C64::new(out[k].norm(), 0.0);
    out
}

/// Principal argument in `(-π, π]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Principal arguments of every component.
pub fn phases(v: &CVec) -> Vec<f64> {
    v.iter().map(|&z| principal_arg(z)).collect()
}

/// Moduli of every component.
pub fn moduli(v: &CVec) -> Vec<f64> {
    v.iter().map(|z| z.norm()).collect()
}

/// Eigen-decomposition of a real skew-symmetric matrix through the Hermitian
/// eigensolver applied to `iA`.
pub fn skew_eigendecomposition(a: &Mat) -> Result<SkewSpectrum> {
    let n = require_square(a, "lead matrix")?;
    let residual = skew_residual(a);
    if residual > SKEW_INPUT_TOL {
        return Err(Error::NotSkew { residual });
    }
    let h = to_complex(a) * C64::new(0.0, 1.0);
    let (values, vectors) = hermitian_eigen(&h);
    let mut order = Vec::with_capacity(n);
    for k in 0..n / 2 {
        order.push(n - 1 - k);
        order.push(k);
    }
    if n % 2 == 1 {
        order.push(n / 2);
    }
    let eigenvalues: Vec<C64> = order.iter().map(|&k| C64::new(0.0, -values[k])).collect();
    let eigenvectors = CMat::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    let leading_eigenvector = if a.norm() == 0.0 {
        let mut e = CVec::zeros(n);
        e[0] = C64::new(1.0, 0.0);
        e
    } else {
        normalize_phase(&eigenvectors.column(0).clone_owned())
    };
    let eigenvalues = if a.norm() == 0.0 {
        vec![C64::new(0.0, 0.0); n]
    } else {
        eigenvalues
    };
    Ok(SkewSpectrum {
        phases: phases(&leading_eigenvector),
        moduli: moduli(&leading_eigenvector),
        eigenvalues,
        eigenvectors,
        leading_eigenvector,
    })
}

/// Ratio `|λ1/λ3|` of the first to the third largest eigenvalue modulus,
/// with `+∞` reported for numerically rank-two matrices.
pub fn eigenvalue_ratio(a: &Mat) -> Result<f64> {
    if a.nrows() < 3 {
        return Err(Error::InvalidInput("eigenvalue ratio needs N >= 3".into()));
    }
    skew_eigendecomposition(a)?.ratio()
}

/// Gershgorin radii `R_j = Σ_k |A_{j,k}|`.
pub fn gershgorin_radii<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Vec<f64> {
    a.row_iter()
        .map(|row| row.iter().map(|x| x.clone().modulus()).sum())
        .collect()
}

/// The matrix with row `j` and column `j` removed (one-based `j`).
pub fn principal_minor<T: Scalar>(a: &DMatrix<T>, j: usize) -> Result<DMatrix<T>> {
    require_square(a, "matrix")?;
    if j == 0 || j > a.nrows() {
        return Err(Error::InvalidInput(format!(
            "minor index {j} outside 1..={}",
            a.nrows()
        )));
    }
    Ok(a.clone().remove_row(j - 1).remove_column(j - 1))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn largest_hermitian_eigenvalue(h: &CMat) -> f64 {
    hermitian_eigen(h).0[0]
}

/// Maximum deviation, over components `j`, between `|v_{1,j}|²` and
/// `Π_k (λ1 - λ_k(M_j)) / Π_{k≥2} (λ1 - λ_k)`, where `M_j` is the `j`-th
/// principal minor of the Hermitian matrix `h`.
pub fn eigen_eigvec_identity_check(h: &CMat) -> Result<f64> {
    let n = require_square(h, "Hermitian matrix")?;
    let herm = (h - h.adjoint()).norm();
    if herm > 1e-10 * h.norm().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (residual {herm:e})"
        )));
    }
    let (values, vectors) = hermitian_eigen(h);
    if n == 1 {
        return Ok((vectors[(0, 0)].norm_sqr() - 1.0).abs());
    }
    let scale = values
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if values[0] - values[1] < 1e-12 * scale {
        return Err(Error::Degenerate(format!(
            "largest eigenvalue is not simple (gap {:e})",
            values[0] - values[1]
        )));
    }
    let l1 = values[0];
    let denominator: f64 = values[1..].iter().map(|v| l1 - v).product();
    let mut worst: f64 = 0.0;
    for j in 1..=n {
        let minor = principal_minor(h, j)?;
        let (mu, _) = hermitian_eigen(&minor);
        let numerator: f64 = mu.iter().map(|m| l1 - m).product();
        let lhs = vectors[(j - 1, 0)].norm_sqr();
        worst = worst.max((lhs - numerator / denominator).abs());
    }
    Ok(worst)
}

/// Leading eigenpair of the rank-two matrix `abᵀ - baᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank2Eigensystem {
    /// `λ1 = i sin(θ) |a| |b|`.
    pub eigenvalue: C64,
    /// Phase-normalised unit vector along `-e^{iθ} a/|a| + b/|b|`.
    pub eigenvector: CVec,
    /// Angle `θ ∈ (0, π)` between `a` and `b`.
    pub angle: f64,
}

/// Closed-form leading eigenpair of `abᵀ - baᵀ` for linearly independent
/// real vectors `a` and `b`.
pub fn rank2_eigensystem(a: &[f64], b: &[f64]) -> Result<Rank2Eigensystem> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidInput(
            "vectors must be non-empty and of equal length".into(),
        ));
    }
    let a = DVector::from_column_slice(a);
    let b = DVector::from_column_slice(b);
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate(
            "zero vector in rank-two factorisation".into(),
        ));
    }
    let (ua, ub) = (&a / na, &b / nb);
    let cos = ua.dot(&ub).clamp(-1.0, 1.0);
    let sin = (&ub - &ua * cos).norm();
    if sin < 1e-12 {
        return Err(Error::Degenerate("vectors are collinear".into()));
    }
    let angle = sin.atan2(cos);
    let twist = -C64::from_polar(1.0, angle);
    let v = CVec::from_fn(a.len(), |i, _| twist * ua[i] + C64::new(ub[i], 0.0));
    let v = &v / C64::new(v.norm(), 0.0);
    Ok(Rank2Eigensystem {
        eigenvalue: C64::new(0.0, sin * na * nb),
        eigenvector: normalize_phase(&v),
        angle,
    })
}

/// One-based component indices sorted by phase mapped to `[0, 2π)`, ties by
/// index.
pub fn phase_argsort(v: &CVec) -> Vec<usize> {
    let wrapped: Vec<f64> = phases(v).into_iter().map(|p| p.rem_euclid(TAU)).collect();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| wrapped[i].total_cmp(&wrapped[j]).then(i.cmp(&j)));
    order.into_iter().map(|i| i + 1).collect()
}

/// Orientation under which two cyclic orders agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Same direction of traversal.
    Same,
    /// Reversed direction, as produced by conjugating the eigenvector.
    Reversed,
}

impl Orientation {
    /// Lower-case label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Orientation::Same => "same",
            Orientation::Reversed => "reversed",
        }
    }
}

/// Shift and orientation relating two cyclic orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicMatch {
    /// Orientation that matched.
    pub orientation: Orientation,
    /// Rotation `d` with `found[i] = reference[(i + d) mod N]` (in the
    /// matched orientation).
    pub shift: usize,
}

/// Finds a cyclic shift, trying the same orientation first and then the
/// reversed one, under which `found` equals `reference`.
pub fn cyclic_match(found: &[usize], reference: &[usize]) -> Option<CyclicMatch> {
    if found.len() != reference.len() {
        return None;
    }
    let n = found.len();
    if n == 0 {
        return Some(CyclicMatch {
            orientation: Orientation::Same,
            shift: 0,
        });
    }
    let reversed: Vec<usize> = reference.iter().rev().copied().collect();
    for (orientation, candidate) in [
        (Orientation::Same, reference),
        (Orientation::Reversed, &reversed[..]),
    ] {
        for shift in 0..n {
            if (0..n).all(|i| found[i] == candidate[(i + shift) % n]) {
                return Some(CyclicMatch { orientation, shift });
            }
        }
    }
    None
}

/// Residual `min_{|c|=1} |v - c u|` for unit vectors `u` and `v`.
pub fn phase_aligned_residual(v: &CVec, u: &CVec) -> f64 {
    let inner = u.dotc(v);
    let c = if inner.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        inner / inner.norm()
    };
    (v - u * c).norm()
}
