//! Chain-of-offsets models: every component is a scaled, time-shifted copy of
//! one periodic signal.
//!
//! The underlying signal is `φ(t) = Σ_{k ∈ Z} φ̂_k e^{2πikt/P}` with
//! `φ̂_{-k} = conj(φ̂_k)`, stored as the coefficients for `k >= 0`. Component
//! `n` is `x_n(t) = c_n φ(t - α_n)`. Over one period its lead matrix has entry
//! `4π c_m c_n Σ_{k>=1} k |φ̂_k|² sin(2πk(α_n - α_m)/P)`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::lead::{LeadKind, LeadMatrix};
use crate::linalg::{Mat, C64};
use crate::simulate::LeadAccumulator;
use crate::spectral::{cyclic_match, phase_argsort, skew_eigendecomposition, CyclicMatch};

use nalgebra::DVector;

/// Smallest trapezoid grid used by [`cross_correlation`].
pub const MIN_QUADRATURE_POINTS: usize = 2048;

/// Largest trapezoid grid tried by [`cross_correlation`].
pub const MAX_QUADRATURE_POINTS: usize = 1 << 22;

/// Change between successive grid doublings accepted as converged.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// A periodic chain-of-offsets model.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoom {
    period: f64,
    fourier: Vec<(usize, C64)>,
    scales: Vec<f64>,
    offsets: Vec<f64>,
}

impl PeriodicCoom {
    /// Validates the model and reduces the offsets into `[0, P)`.
    ///
    /// `fourier` lists `(k, φ̂_k)` for distinct `k >= 0`; the coefficient of
    /// `k = 0` must be real.
    pub fn new(
        period: f64,
        fourier: Vec<(usize, C64)>,
        scales: Vec<f64>,
        offsets: Vec<f64>,
    ) -> Result<Self> {
        if period <= 0.0 || !period.is_finite() {
            return Err(Error::InvalidInput(format!(
                "period must be finite and > 0, got {period}"
            )));
        }
        if scales.is_empty() || scales.len() != offsets.len() {
            return Err(Error::InvalidInput(format!(
                "need matching non-empty scales and offsets, got {} and {}",
                scales.len(),
                offsets.len()
            )));
        }
        if scales.iter().any(|c| *c <= 0.0 || !c.is_finite()) {
            return Err(Error::InvalidInput("scales must be finite and > 0".into()));
        }
        if offsets.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("offsets must be finite".into()));
        }
        let mut seen: Vec<usize> = fourier.iter().map(|(k, _)| *k).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("repeated harmonic index".into()));
        }
        if fourier
            .iter()
            .any(|(_, c)| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidInput(
                "Fourier coefficients must be finite".into(),
            ));
        }
        if fourier.iter().any(|(k, c)| *k == 0 && c.im != 0.0) {
            return Err(Error::InvalidInput(
                "the constant coefficient must be real".into(),
            ));
        }
        if fourier.iter().all(|(_, c)| c.norm() == 0.0) {
            return Err(Error::InvalidInput("Fourier support is empty".into()));
        }
        let offsets = offsets
            .into_iter()
            .map(|a| a.rem_euclid(period))
            .map(|a| if a >= period { 0.0 } else { a })
            .collect();
        Ok(Self {
            period,
            fourier,
            scales,
            offsets,
        })
    }

    /// Sinusoid network `x_n(t) = sin(2π(t - (n-1)/N))` with period 1.
    pub fn sinusoid_network(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("sinusoid network needs N >= 1".into()));
        }
        let offsets = (0..n).map(|k| k as f64 / n as f64).collect();
        Self::new(1.0, vec![(1, C64::new(0.0, -0.5))], vec![1.0; n], offsets)
    }

    /// Period `P`.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Harmonic coefficients `(k, φ̂_k)`.
    pub fn fourier(&self) -> &[(usize, C64)] {
        &self.fourier
    }

    /// Scales `c_n`.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Offsets `α_n ∈ [0, P)`.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Number of components `N`.
    pub fn n(&self) -> usize {
        self.scales.len()
    }

    /// The underlying signal `φ(t)`.
    pub fn base_signal(&self, t: f64) -> f64 {
        self.fourier
            .iter()
            .map(|&(k, c)| {
                if k == 0 {
                    c.re
                } else {
                    2.0 * (c * C64::from_polar(1.0, TAU * k as f64 * t / self.period)).re
                }
            })
            .sum()
    }

    /// Component `n` (one-based) at time `t`.
    pub fn component(&self, n: usize, t: f64) -> f64 {
        self.scales[n - 1] * self.base_signal(t - self.offsets[n - 1])
    }

    /// Samples one period at `samples` equal steps, including the closing
    /// time `P`, so the returned signal has `samples + 1` rows.
    pub fn sample_period(&self, samples: usize) -> Result<SampledSignal> {
        if samples < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 samples per period, got {samples}"
            )));
        }
        let times: Vec<f64> = (0..=samples)
            .map(|k| self.period * k as f64 / samples as f64)
            .collect();
        let values = Mat::from_fn(samples + 1, self.n(), |k, n| {
            self.component(n + 1, times[k])
        });
        SampledSignal::new(values, times)
    }
}

/// A multivariate signal sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    values: Mat,
    times: Vec<f64>,
}

impl SampledSignal {
    /// Wraps `K x N` values sampled at `K >= 2` strictly increasing times.
    pub fn new(values: Mat, times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || values.nrows() != times.len() || values.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 samples with one time each, got {} rows and {} times",
                values.nrows(),
                times.len()
            )));
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidInput(
                "sample times must be strictly increasing".into(),
            ));
        }
        if values.iter().chain(&times).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("sampled signal must be finite".into()));
        }
        Ok(Self { values, times })
    }

    /// The `K x N` values.
    pub fn values(&self) -> &Mat {
        &self.values
    }

    /// The sample times.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Shoelace lead matrix of the sampled path.
    pub fn lead_matrix(&self) -> Result<LeadMatrix> {
        let mut acc = LeadAccumulator::new(self.values.ncols());
        for k in 0..self.values.nrows() {
            acc.push(&DVector::from_iterator(
                self.values.ncols(),
                self.values.row(k).iter().copied(),
            ));
        }
        acc.lead()
    }
}

fn trapezoid_correlation<F, G>(f: &F, g: &G, period: f64, tau: f64, points: usize) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let h = period / points as f64;
    (0..points)
        .map(|k| {
            let t = k as f64 * h;
            f(t - tau) * g(t)
        })
        .sum::<f64>()
        * h
}

/// Periodic cross-correlation `∫_0^P f(t - τ) g(t) dt` at each `τ`, by the
/// trapezoid rule on at least [`MIN_QUADRATURE_POINTS`] points, doubling the
/// grid until successive values change by less than [`QUADRATURE_TOL`]
/// relative to `max(1, |value|)`.
pub fn cross_correlation<F, G>(f: F, g: G, period: f64, taus: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if period <= 0.0 || !period.is_finite() {
        return Err(Error::InvalidInput(format!(
            "period must be finite and > 0, got {period}"
        )));
    }
    taus.iter()
        .map(|&tau| {
            let mut points = MIN_QUADRATURE_POINTS;
            let mut value = trapezoid_correlation(&f, &g, period, tau, points);
            loop {
                points *= 2;
                let refined = trapezoid_correlation(&f, &g, period, tau, points);
                if !refined.is_finite() {
                    return Err(Error::NoConvergence(format!(
                        "cross-correlation is not finite at tau = {tau}"
                    )));
                }
                if (refined - value).abs() < QUADRATURE_TOL * refined.abs().max(1.0) {
                    return Ok(refined);
                }
                if points >= MAX_QUADRATURE_POINTS {
                    return Err(Error::NoConvergence(format!(
                        "cross-correlation did not settle at tau = {tau}"
                    )));
                }
                value = refined;
            }
        })
        .collect()
}

/// Shoelace oriented area `(1/2) Σ (x_k y_{k+1} - x_{k+1} y_k)` of the sampled
/// planar path `(x, y)`; positive for counterclockwise traversal.
pub fn oriented_area(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "sample lengths differ: {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(0.5
        * (1..x.len())
            .map(|k| x[k - 1] * y[k] - x[k] * y[k - 1])
            .sum::<f64>())
}

/// Lead matrix of the model over one period.
pub fn coom_lead_matrix(model: &PeriodicCoom) -> Result<LeadMatrix> {
    let n = model.n();
    let p = model.period;
    let q = Mat::from_fn(n, n, |m, j| {
        let gap = model.offsets[j] - model.offsets[m];
        let sum: f64 = model
            .fourier
            .iter()
            .filter(|(k, _)| *k >= 1)
            .map(|&(k, c)| k as f64 * c.norm_sqr() * (TAU * k as f64 * gap / p).sin())
            .sum();
        4.0 * PI * model.scales[m] * model.scales[j] * sum
    });
    LeadMatrix::new(q, LeadKind::ClosedForm)
}

/// Vectors `a`, `b` with `abᵀ - baᵀ` equal to the lead matrix of a model with
/// a single harmonic `k >= 1`: `a_n = √(4πk) |φ̂_k| c_n cos(2πkα_n/P)` and
/// `b_n` the same with sine. A constant term is ignored.
pub fn one_harmonic_vectors(model: &PeriodicCoom) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut active = model
        .fourier
        .iter()
        .filter(|(k, c)| *k >= 1 && c.norm() > 0.0);
    let (k, c) = match (active.next(), active.next()) {
        (Some(&(k, c)), None) => (k, c),
        (None, _) => {
            return Err(Error::InvalidInput(
                "model has no nonconstant harmonic".into(),
            ))
        }
        _ => {
            return Err(Error::InvalidInput(
                "model has more than one nonconstant harmonic".into(),
            ))
        }
    };
    let amplitude = (4.0 * PI * k as f64).sqrt() * c.norm();
    let angle = |n: usize| TAU * k as f64 * model.offsets[n] / model.period;
    let a = (0..model.n())
        .map(|n| amplitude * model.scales[n] * angle(n).cos())
        .collect();
    let b = (0..model.n())
        .map(|n| amplitude * model.scales[n] * angle(n).sin())
        .collect();
    Ok((a, b))
}

/// Greedy cyclic order of the offsets: `σ(1)` is the index of the smallest
/// offset and each next index is the unused one reached first when moving
/// forward in time, ties going to the lowest index. Indices are one-based.
pub fn offset_cyclic_order(offsets: &[f64], period: f64) -> Result<Vec<usize>> {
    if period <= 0.0 || !period.is_finite() {
        return Err(Error::InvalidInput(format!(
            "period must be finite and > 0, got {period}"
        )));
    }
    if offsets.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidInput("offsets must be finite".into()));
    }
    let n = offsets.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let reduced: Vec<f64> = offsets.iter().map(|a| a.rem_euclid(period)).collect();
    let mut used = vec![false; n];
    let first = (0..n).fold(
        0,
        |best, i| if reduced[i] < reduced[best] { i } else { best },
    );
    let mut order = vec![first];
    used[first] = true;
    while order.len() < n {
        let current = reduced[*order.last().expect("non-empty")];
        let next = (0..n)
            .filter(|&i| !used[i])
            .min_by(|&i, &j| {
                let di = (reduced[i] - current).rem_euclid(period);
                let dj = (reduced[j] - current).rem_euclid(period);
                di.total_cmp(&dj).then(i.cmp(&j))
            })
            .expect("an unused index remains");
        used[next] = true;
        order.push(next);
    }
    Ok(order.into_iter().map(|i| i + 1).collect())
}

/// Cyclic order read from the leading eigenvector of a lead matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOrderRecovery {
    /// One-based component indices sorted by phase in `[0, 2π)`.
    pub order: Vec<usize>,
    /// Dominance diagnostic `|λ1/λ3|` (`+∞` for rank two, absent for `N < 3`).
    pub ratio: Option<f64>,
    /// Leading eigenvalue `λ1`.
    pub leading_eigenvalue: C64,
}

impl PhaseOrderRecovery {
    /// Compares the recovered order with `reference` modulo cyclic shifts and
    /// orientation.
    pub fn compare(&self, reference: &[usize]) -> Option<CyclicMatch> {
        cyclic_match(&self.order, reference)
    }
}

/// Recovers the cyclic order of the components from the phases of the
/// leading eigenvector of `a`.
pub fn phase_order_recovery(a: &LeadMatrix) -> Result<PhaseOrderRecovery> {
    if a.matrix().norm() == 0.0 {
        return Err(Error::Degenerate(
            "zero lead matrix has no phase order".into(),
        ));
    }
    let spectrum = skew_eigendecomposition(a.matrix())?;
    let ratio = if a.n() >= 3 {
        Some(spectrum.ratio()?)
    } else {
        None
    };
    Ok(PhaseOrderRecovery {
        order: phase_argsort(&spectrum.leading_eigenvector),
        ratio,
        leading_eigenvalue: spectrum.leading_eigenvalue(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_validation() {
        let one = vec![(1, C64::new(1.0, 0.0))];
        assert!(PeriodicCoom::new(0.0, one.clone(), vec![1.0], vec![0.0]).is_err());
        assert!(PeriodicCoom::new(1.0, vec![], vec![1.0], vec![0.0]).is_err());
        assert!(PeriodicCoom::new(1.0, one.clone(), vec![0.0], vec![0.0]).is_err());
        assert!(PeriodicCoom::new(1.0, one.clone(), vec![1.0, 1.0], vec![0.0]).is_err());
        assert!(
            PeriodicCoom::new(1.0, vec![(0, C64::new(1.0, 1.0))], vec![1.0], vec![0.0]).is_err()
        );
        assert!(PeriodicCoom::new(
            1.0,
            vec![(1, C64::new(1.0, 0.0)), (1, C64::new(2.0, 0.0))],
            vec![1.0],
            vec![0.0]
        )
        .is_err());
        let m = PeriodicCoom::new(2.0, one, vec![1.0, 1.0], vec![-0.5, 4.25]).unwrap();
        assert_eq!(m.offsets(), &[1.5, 0.25]);
    }

    #[test]
    fn sinusoid_network_components() {
        let m = PeriodicCoom::sinusoid_network(4).unwrap();
        for t in [0.0, 0.13, 0.7] {
            for n in 1..=4 {
                let expected = (TAU * (t - (n as f64 - 1.0) / 4.0)).sin();
                assert!((m.component(n, t) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn greedy_order_examples() {
        assert_eq!(
            offset_cyclic_order(&[0.0, 0.25, 0.5, 0.75], 1.0).unwrap(),
            vec![1, 2, 3, 4]
        );
        assert_eq!(
            offset_cyclic_order(&[0.75, 0.5, 0.25, 0.0], 1.0).unwrap(),
            vec![4, 3, 2, 1]
        );
        assert_eq!(
            offset_cyclic_order(&[0.3, 0.3, 0.3], 1.0).unwrap(),
            vec![1, 2, 3]
        );
        assert!(offset_cyclic_order(&[0.0], 0.0).is_err());
    }

    #[test]
    fn oriented_area_rejects_mismatched_lengths() {
        assert!(oriented_area(&[0.0, 1.0], &[0.0]).is_err());
    }
}
