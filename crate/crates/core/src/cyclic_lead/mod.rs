//! Closed-form and asymptotic lead matrices of the cyclic propagation network.
//!
//! The network has `N` sensors arranged on a cycle. A signal moves from each
//! sensor to the one `p - 1` places earlier with coefficient `b_p ≤ 0`, and
//! the friction matrix is `B(ε) = Circ(ε - b_p, 0, ..., b_p, ..., 0)` with
//! `b_p` in position `p`. Its stability margin is exactly `ε`. Noise of
//! variance `d_s` is injected into a chosen set of sensors.
//!
//! Large `ε` (strong dissipation) is the first regime and small `ε`
//! (near-instability) the second regime. Both limits have explicit
//! expansions, implemented here together with the exact closed forms.

mod conjectures;

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

pub use conjectures::{numeric_conjecture_checks, CheckStatus, ConjectureReport, ConjectureRow};

use crate::circulant::{fourier_basis, root_power, CirculantSpec};
use crate::error::{Error, Result};
use crate::index::{gcd, mod_inverse, wrap};
use crate::lead::{LeadKind, LeadMatrix};
use crate::linalg::{real_part_checked, CMat, CVec, Mat, C64};

/// A cyclic network with a single nonzero propagation coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationNetwork {
    n: usize,
    p: usize,
    b_p: f64,
    epsilon: f64,
}

impl PropagationNetwork {
    /// Validates `2 ≤ p ≤ N`, `b_p ≤ 0`, `ε > 0` and `gcd(p - 1, N) = 1`.
    pub fn new(n: usize, p: usize, b_p: f64, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "network needs N >= 2, got {n}"
            )));
        }
        if p < 2 || p > n {
            return Err(Error::InvalidInput(format!(
                "propagation index p = {p} outside 2..={n}"
            )));
        }
        if b_p > 0.0 || !b_p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "propagation coefficient must be finite and <= 0, got {b_p}"
            )));
        }
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "perturbation must be finite and > 0, got {epsilon}"
            )));
        }
        let g = gcd(p - 1, n);
        if g != 1 {
            return Err(Error::NoInverse {
                step: p - 1,
                n,
                gcd: g,
            });
        }
        Ok(Self { n, p, b_p, epsilon })
    }

    /// Number of sensors `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Index `p` of the propagation coefficient.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Propagation coefficient `b_p`.
    pub fn b_p(&self) -> f64 {
        self.b_p
    }

    /// Perturbation `ε`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The same network with another perturbation.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.n, self.p, self.b_p, epsilon)
    }

    /// Friction matrix `B(ε)` as a circulant description.
    pub fn friction(&self) -> CirculantSpec {
        let mut row = vec![0.0; self.n];
        row[0] = self.epsilon - self.b_p;
        row[self.p - 1] = self.b_p;
        CirculantSpec::new(row).expect("non-empty finite row")
    }

    fn root_step(&self, m: usize) -> C64 {
        root_power(m as i64, self.p as i64 - 1, self.n)
    }
}

/// Which sensors receive noise, all with a common variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// Noise of the given variance in sensor `sensor` only.
    OneSensor { sensor: usize, variance: f64 },
    /// Independent noise in the last `count` sensors.
    Trailing { count: usize, variance: f64 },
    /// Independent noise in every sensor.
    All { variance: f64 },
}

impl NoiseSpec {
    /// Validates the noise layout against `N` sensors.
    pub fn validate(&self, n: usize) -> Result<()> {
        let variance = match *self {
            NoiseSpec::OneSensor { sensor, variance } => {
                if sensor == 0 || sensor > n {
                    return Err(Error::InvalidInput(format!(
                        "noise sensor {sensor} outside 1..={n}"
                    )));
                }
                variance
            }
            NoiseSpec::Trailing { count, variance } => {
                if count == 0 || count > n {
                    return Err(Error::InvalidInput(format!(
                        "noisy block size {count} outside 1..={n}"
                    )));
                }
                variance
            }
            NoiseSpec::All { variance } => variance,
        };
        if variance < 0.0 || !variance.is_finite() {
            return Err(Error::InvalidInput(format!(
                "noise variance must be finite and >= 0, got {variance}"
            )));
        }
        Ok(())
    }

    /// Diagonal diffusion matrix `D` for `N` sensors.
    pub fn diffusion(&self, n: usize) -> Result<Mat> {
        self.validate(n)?;
        let mut d = Mat::zeros(n, n);
        match *self {
            NoiseSpec::OneSensor { sensor, variance } => d[(sensor - 1, sensor - 1)] = variance,
            NoiseSpec::Trailing { count, variance } => {
                for s in (n - count)..n {
                    d[(s, s)] = variance;
                }
            }
            NoiseSpec::All { variance } => d.fill_diagonal(variance),
        }
        Ok(d)
    }
}

fn assemble(coefficients: &CMat, kind: LeadKind) -> Result<LeadMatrix> {
    let w = fourier_basis(coefficients.nrows());
    let q = real_part_checked(&(&w * coefficients * w.transpose()))?;
    LeadMatrix::new(q, kind)
}

fn require_sensor(s: usize, n: usize) -> Result<()> {
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!(
            "noise sensor {s} outside 1..={n}"
        )));
    }
    Ok(())
}

fn require_variance(d: f64) -> Result<()> {
    if d < 0.0 || !d.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise variance must be finite and >= 0, got {d}"
        )));
    }
    Ok(())
}

/// Exact lead matrix for noise of variance `d_s` in sensor `s`:
/// `(d_s b_p/N) Σ_{m,n} (ω_m^{p-1} - ω_n^{p-1}) ω_{m+n}^{1-s}
///  / (2ε + b_p(ω_m^{p-1} + ω_n^{p-1} - 2)) · w_m w_nᵀ`.
pub fn q_one_sensor(net: &PropagationNetwork, s: usize, d_s: f64) -> Result<LeadMatrix> {
    require_sensor(s, net.n)?;
    require_variance(d_s)?;
    let n = net.n;
    let scale = d_s * net.b_p / n as f64;
    let c = DMatrix::from_fn(n, n, |i, j| {
        let (wm, wn) = (net.root_step(i + 1), net.root_step(j + 1));
        let denom = C64::new(2.0 * net.epsilon, 0.0) + (wm + wn - C64::new(2.0, 0.0)) * net.b_p;
        (wm - wn) * root_power((i + j + 2) as i64, 1 - s as i64, n) * scale / denom
    });
    assemble(&c, LeadKind::ClosedForm)
}

/// Rank-two first-regime expansion for noise in sensor `s`: entry
/// `(s+1-p, s)` equals `d_s b_p/(2ε)`, entry `(s, s+1-p)` its negative.
pub fn q_first_regime_one_sensor(
    net: &PropagationNetwork,
    s: usize,
    d_s: f64,
) -> Result<LeadMatrix> {
    require_sensor(s, net.n)?;
    require_variance(d_s)?;
    let mut q = Mat::zeros(net.n, net.n);
    let r = wrap(s as i64 + 1 - net.p as i64, net.n);
    let value = d_s * net.b_p / (2.0 * net.epsilon);
    q[(r - 1, s - 1)] = value;
    q[(s - 1, r - 1)] = -value;
    LeadMatrix::new(q, LeadKind::Asymptotic)
}

/// The first-regime limit direction `(i e_s + e_{s+1-p})/√2`.
///
/// For `b_p < 0` this is the eigenvector of the lead matrix belonging to the
/// negative-imaginary member of the leading pair, i.e. the conjugate of the
/// vector chosen by [`crate::spectral::skew_eigendecomposition`].
pub fn v1_first_regime_limit(s: usize, p: usize, n: usize) -> Result<CVec> {
    require_sensor(s, n)?;
    if p < 2 || p > n {
        return Err(Error::InvalidInput(format!(
            "propagation index p = {p} outside 2..={n}"
        )));
    }
    let mut v = CVec::zeros(n);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    v[s - 1] = C64::new(0.0, h);
    v[wrap(s as i64 + 1 - p as i64, n) - 1] = C64::new(h, 0.0);
    Ok(v)
}

/// Second-regime limit for noise in sensor `s`:
/// `(d_s/N) Σ_{m,n} (ω_m^{p-1} - ω_n^{p-1}) ω_{m+n}^{1-s}
///  / (ω_m^{p-1} + ω_n^{p-1} - 2) · w_m w_nᵀ`, with the `m = n = N` term set
/// to zero. The coefficient `b_p` and the perturbation do not enter.
pub fn q_second_regime_one_sensor(
    net: &PropagationNetwork,
    s: usize,
    d_s: f64,
) -> Result<LeadMatrix> {
    require_sensor(s, net.n)?;
    require_variance(d_s)?;
    let n = net.n;
    let scale = d_s / n as f64;
    let c = DMatrix::from_fn(n, n, |i, j| {
        if i == n - 1 && j == n - 1 {
            return C64::new(0.0, 0.0);
        }
        let (wm, wn) = (net.root_step(i + 1), net.root_step(j + 1));
        (wm - wn) * root_power((i + j + 2) as i64, 1 - s as i64, n) * scale
            / (wm + wn - C64::new(2.0, 0.0))
    });
    assemble(&c, LeadKind::Asymptotic)
}

/// `(1/2)^m C(m, r)` evaluated exactly for `m ≤ 60` and in log space above.
fn half_power_binomial(m: usize, r: usize) -> f64 {
    if r > m {
        return 0.0;
    }
    let r = r.min(m - r);
    if m <= 60 {
        let mut c: u128 = 1;
        for i in 0..r {
            c = c * (m - i) as u128 / (i + 1) as u128;
        }
        return c as f64 * 0.5f64.powi(m as i32);
    }
    let log_c: f64 = (1..=r)
        .map(|i| (((m - r + i) as f64) / i as f64).ln())
        .sum();
    (log_c - m as f64 * std::f64::consts::LN_2).exp()
}

/// Real skew-symmetric matrix `A` underlying the binomial matrix: entry
/// `(j, k) = (1/2)^{M} (k-j)/M · C(M, N-k)` with `M = 2N - j - k`, and the
/// `(N, N)` entry zero.
pub fn binomial_skew(n: usize) -> Result<Mat> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "binomial matrix needs N >= 2, got {n}"
        )));
    }
    Ok(Mat::from_fn(n, n, |j, k| {
        let (j, k) = (j + 1, k + 1);
        if j == k {
            return 0.0;
        }
        let m = 2 * n - j - k;
        (k as f64 - j as f64) / m as f64 * half_power_binomial(m, n - k)
    }))
}

/// Hermitian binomial matrix `A_N = i A` with `A` from [`binomial_skew`].
pub fn binomial_matrix(n: usize) -> Result<CMat> {
    Ok(binomial_skew(n)?.map(|x| C64::new(0.0, x)))
}

fn require_block(l: usize, n: usize) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::InvalidInput(format!(
            "noisy block size {l} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Exact lead matrix for independent noise of variance `d` in the last `L`
/// sensors, as the sum of one-sensor matrices over `s = N - ℓ + 1`.
pub fn q_multi_sensor(net: &PropagationNetwork, l: usize, d: f64) -> Result<LeadMatrix> {
    require_block(l, net.n)?;
    let mut total = Mat::zeros(net.n, net.n);
    for ell in 1..=l {
        total += q_one_sensor(net, net.n - ell + 1, d)?.matrix();
    }
    LeadMatrix::new(total, LeadKind::ClosedForm)
}

/// The same matrix as [`q_multi_sensor`], assembled as one double sum with
/// the factor `Σ_{ℓ=1}^{L} ω_{m+n}^{ℓ}`.
pub fn q_multi_sensor_direct(net: &PropagationNetwork, l: usize, d: f64) -> Result<LeadMatrix> {
    require_block(l, net.n)?;
    require_variance(d)?;
    let n = net.n;
    let scale = d * net.b_p / n as f64;
    let c = DMatrix::from_fn(n, n, |i, j| {
        let (wm, wn) = (net.root_step(i + 1), net.root_step(j + 1));
        let denom = C64::new(2.0 * net.epsilon, 0.0) + (wm + wn - C64::new(2.0, 0.0)) * net.b_p;
        let phase: C64 = (1..=l)
            .map(|ell| root_power((i + j + 2) as i64, ell as i64, n))
            .sum();
        (wm - wn) * phase * scale / denom
    });
    assemble(&c, LeadKind::ClosedForm)
}

/// Second-regime limit for noise in the last `L` sensors.
pub fn q_second_regime_multi_sensor(
    net: &PropagationNetwork,
    l: usize,
    d: f64,
) -> Result<LeadMatrix> {
    require_block(l, net.n)?;
    let mut total = Mat::zeros(net.n, net.n);
    for ell in 1..=l {
        total += q_second_regime_one_sensor(net, net.n - ell + 1, d)?.matrix();
    }
    LeadMatrix::new(total, LeadKind::Asymptotic)
}

/// First-regime limit direction for `p = 2` and noise in the last `L`
/// sensors: zeros in the first `N - L - 1` positions followed by
/// `i^ℓ sin(ℓπ/(L+2))` for `ℓ = 1..=L+1`, normalised.
pub fn v1_multi_first_regime(l: usize, n: usize) -> Result<CVec> {
    if l == 0 || l >= n {
        return Err(Error::InvalidInput(format!(
            "block size L = {l} must satisfy 1 <= L < N = {n}"
        )));
    }
    let mut v = CVec::zeros(n);
    let offset = n - l - 1;
    for ell in 1..=l + 1 {
        let unit = match ell % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        v[offset + ell - 1] = unit * (ell as f64 * PI / (l as f64 + 2.0)).sin();
    }
    let norm = v.norm();
    Ok(v / C64::new(norm, 0.0))
}

/// Lead matrix and mode eigenvalues for noise of variance `d` in all sensors.
#[derive(Debug, Clone, PartialEq)]
pub struct AllSensorsLead {
    /// The circulant lead matrix.
    pub lead: LeadMatrix,
    /// Eigenvalue of `w_n` for `n = 1..=N` (index `n - 1`).
    pub mode_eigenvalues: Vec<C64>,
}

/// Exact lead matrix for identical independent noise in every sensor:
/// `Q = -i d Σ_n b_p sin(2πn(p-1)/N) / (ε - 2 b_p sin²(πn(p-1)/N)) · w_{N-n} w_nᵀ`.
pub fn q_all_sensors(net: &PropagationNetwork, d: f64) -> Result<AllSensorsLead> {
    require_variance(d)?;
    let n = net.n;
    let step = net.p - 1;
    let weight = |k: usize| {
        let residue = k * step % n;
        if 2 * residue % n == 0 {
            return 0.0;
        }
        let r = residue as f64 / n as f64;
        let half = (PI * r).sin();
        d * net.b_p * (TAU * r).sin() / (net.epsilon - 2.0 * net.b_p * half * half)
    };
    let mut c = CMat::zeros(n, n);
    for k in 1..=n {
        let row = wrap(n as i64 - k as i64, n) - 1;
        c[(row, k - 1)] = C64::new(0.0, -weight(k));
    }
    let lead = assemble(&c, LeadKind::ClosedForm)?;
    let mode_eigenvalues = (1..=n).map(|k| C64::new(0.0, weight(k))).collect();
    Ok(AllSensorsLead {
        lead,
        mode_eigenvalues,
    })
}

/// The unique `q ∈ 1..=N` with `q (p - 1) ≡ 1 (mod N)`.
pub fn leading_mode_all_sensors(n: usize, p: usize) -> Result<usize> {
    if p < 2 || p > n {
        return Err(Error::InvalidInput(format!(
            "propagation index p = {p} outside 2..={n}"
        )));
    }
    mod_inverse(p - 1, n)
}

fn require_coprime(n: usize, p: usize) -> Result<()> {
    if n == 0 || p < 2 || p > n.max(2) {
        return Err(Error::InvalidInput(format!(
            "propagation index p = {p} outside 2..={n}"
        )));
    }
    let g = gcd(p - 1, n);
    if g != 1 {
        return Err(Error::NoInverse {
            step: p - 1,
            n,
            gcd: g,
        });
    }
    Ok(())
}

/// Cyclic order `σ(n) ≡ N - (n-1)(p-1) (mod N)`, listed as `σ(1), ..., σ(N)`.
pub fn cyclic_order_permutation(n: usize, p: usize) -> Result<Vec<usize>> {
    require_coprime(n, p)?;
    Ok((1..=n)
        .map(|k| wrap(n as i64 - (k as i64 - 1) * (p as i64 - 1), n))
        .collect())
}

/// Cyclic order defined by `q(σ(n) - 1) ≡ n - 1 (mod N)`, i.e.
/// `σ(n) ≡ 1 + (n-1)(p-1)`. This is the phase order of `w_q`; it traverses
/// the same cycle as [`cyclic_order_permutation`] in the opposite direction.
pub fn cyclic_order_from_inverse(n: usize, p: usize) -> Result<Vec<usize>> {
    require_coprime(n, p)?;
    Ok((1..=n)
        .map(|k| wrap(1 + (k as i64 - 1) * (p as i64 - 1), n))
        .collect())
}
