//! Dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;
/// Dense real matrix.
pub type Mat = DMatrix<f64>;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = DVector<C64>;

/// Tolerance on the imaginary part left over by real-valued spectral assemblies.
pub const IMAG_TOL: f64 = 1e-10;

/// Lifts a real matrix into the complex field.
pub fn to_complex(m: &Mat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Extracts the real part of `m` after checking that the imaginary part is
/// below [`IMAG_TOL`] relative to `max(1, |Re m|_F)`.
pub fn real_part_checked(m: &CMat) -> Result<Mat> {
    let re = m.map(|z| z.re);
    let residue = m.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    if residue > IMAG_TOL * re.norm().max(1.0) {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(re)
}

/// Frobenius norm of `A + A^T`.
pub fn skew_residual(m: &Mat) -> f64 {
    (m + m.transpose()).norm()
}

/// Frobenius norm of `A - A^T`.
pub fn symmetry_residual(m: &Mat) -> f64 {
    (m - m.transpose()).norm()
}

/// Checks that `m` is square.
pub fn require_square<T: nalgebra::Scalar>(m: &DMatrix<T>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidInput(format!("{what} must be non-empty")));
    }
    Ok(m.nrows())
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Column `k` of the returned matrix is the unit eigenvector
/// of the `k`-th eigenvalue.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigen-decomposition of a real symmetric matrix with eigenvalues sorted in
/// descending order.
pub fn symmetric_eigen(s: &Mat) -> (Vec<f64>, Mat) {
    let n = s.nrows();
    let sym = (s + s.transpose()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Largest eigenvalue modulus of a general real square matrix.
pub fn spectral_radius(m: &Mat) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Smallest real part over the spectrum of a general real square matrix.
pub fn min_real_eigenvalue(m: &Mat) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric positive-semidefinite square root through the eigendecomposition,
/// with eigenvalues below zero clipped to zero.
pub fn psd_sqrt(s: &Mat) -> Mat {
    let (values, vectors) = symmetric_eigen(s);
    let n = s.nrows();
    let roots = DVector::from_iterator(n, values.iter().map(|&v| v.max(0.0).sqrt()));
    let scaled = Mat::from_fn(n, n, |i, j| vectors[(i, j)] * roots[j]);
    &scaled * vectors.transpose()
}
