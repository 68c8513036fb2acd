//! Numerical observations on conjectured properties of the binomial matrix
//! and of the multi-sensor second-regime limit.
//!
//! Nothing here is asserted: every check is reported with its measured value,
//! its reference value and whether the observation agrees.

use std::f64::consts::PI;

use crate::error::Result;
use crate::linalg::{hermitian_eigen, CVec};
use crate::spectral::{
    gershgorin_radii, normalize_phase, principal_arg, principal_minor, skew_eigendecomposition,
};

use super::{binomial_matrix, q_second_regime_multi_sensor, PropagationNetwork};

/// Interlacing slack.
const INTERLACING_TOL: f64 = 1e-10;
/// Slack for non-strict and strict monotonicity observations.
const MONOTONE_TOL: f64 = 1e-12;

/// Outcome of one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    /// The observed value agrees with the conjectured property.
    Holds,
    /// The observed value contradicts the conjectured property.
    Violated,
    /// A measurement without a pass/fail criterion.
    Reported,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Holds
        } else {
            CheckStatus::Violated
        }
    }

    /// Lower-case label used in tabular output.
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Holds => "holds",
            CheckStatus::Violated => "violated",
            CheckStatus::Reported => "reported",
        }
    }
}

/// One observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureRow {
    /// Matrix dimension `N`.
    pub n: usize,
    /// Name of the quantity observed.
    pub check: &'static str,
    /// Auxiliary index (minor index, Gershgorin offset or block size), 0 if unused.
    pub index: usize,
    /// Measured value.
    pub measured: f64,
    /// Conjectured or exact reference value.
    pub reference: f64,
    /// Agreement between the two.
    pub status: CheckStatus,
}

/// Collection of observations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConjectureReport {
    /// Observations in generation order.
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureReport {
    /// Rows of the given check that were observed to fail.
    pub fn violations(&self, check: &str) -> Vec<&ConjectureRow> {
        self.rows
            .iter()
            .filter(|r| r.check == check && r.status == CheckStatus::Violated)
            .collect()
    }

    /// Rows of the given check.
    pub fn of(&self, check: &str) -> Vec<&ConjectureRow> {
        self.rows.iter().filter(|r| r.check == check).collect()
    }

    fn push(
        &mut self,
        n: usize,
        check: &'static str,
        index: usize,
        measured: f64,
        reference: f64,
        status: CheckStatus,
    ) {
        self.rows.push(ConjectureRow {
            n,
            check,
            index,
            measured,
            reference,
            status,
        });
    }
}

fn central_binomial_limit(j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let mut c = 1.0;
    for i in 0..j {
        c = c * (2 * j - i) as f64 / (i + 1) as f64;
    }
    c / 2f64.powi(2 * j as i32 - 1)
}

/// Length of the run `0 = ψ_N < ψ_{N-1} < ... < ψ_K < π` of phases relative
/// to the last component.
fn trailing_phase_run(v: &CVec) -> usize {
    let n = v.len();
    let anchor = v[n - 1];
    if anchor.norm() == 0.0 {
        return 0;
    }
    let rel: Vec<f64> = v.iter().map(|z| principal_arg(z / anchor)).collect();
    let mut run = 1;
    let mut previous = 0.0;
    for k in (0..n - 1).rev() {
        let phase = rel[k];
        if phase > previous && phase < PI {
            run += 1;
            previous = phase;
        } else {
            break;
        }
    }
    run
}

/// Runs the binomial-matrix observations for every `N` in `dimensions` and
/// the multi-sensor observations for every `(N, L)` in `multi_sensor`.
///
/// Binomial checks: `lambda1` against `2/π`; `lambda3` against `2/(3π)`;
/// `lambda1_nondecreasing` in `N`; `lambda1_at_most_one`;
/// `gershgorin_row_n_minus_1` against `1 - N/2^N`; `gershgorin_limit`
/// against `C(2j, j)/2^{2j-1}`; `gershgorin_bound` (`λ1 ≤ max_j R_j`);
/// `moduli_increasing` (smallest consecutive modulus gap of the leading
/// eigenvector); `interlacing` (largest violation over all minors);
/// `minor_chain` (`λ1(M_{j+1}) < λ1(M_j) < λ1(A_N)`); `phase_run`.
///
/// Multi-sensor checks on the second-regime limit with `p = 2`:
/// `multi_phase_order` (phases relative to component `N-L+1` strictly
/// decreasing after it) and `multi_moduli_peak` (moduli rise up to component
/// `N-L+1` and fall after it).
pub fn numeric_conjecture_checks(
    dimensions: &[usize],
    multi_sensor: &[(usize, usize)],
) -> Result<ConjectureReport> {
    let mut report = ConjectureReport::default();
    let mut previous_lambda: Option<f64> = None;
    for &n in dimensions {
        let a = binomial_matrix(n)?;
        let (values, vectors) = hermitian_eigen(&a);
        let l1 = values[0];
        report.push(n, "lambda1", 0, l1, 2.0 / PI, CheckStatus::Reported);
        if n >= 3 {
            report.push(
                n,
                "lambda3",
                0,
                values[2],
                2.0 / (3.0 * PI),
                CheckStatus::Reported,
            );
        }
        if let Some(prev) = previous_lambda {
            report.push(
                n,
                "lambda1_nondecreasing",
                0,
                l1 - prev,
                0.0,
                CheckStatus::from_bool(l1 - prev >= -MONOTONE_TOL),
            );
        }
        previous_lambda = Some(l1);
        report.push(
            n,
            "lambda1_at_most_one",
            0,
            l1,
            1.0,
            CheckStatus::from_bool(l1 <= 1.0),
        );

        let radii = gershgorin_radii(&a);
        let exact = 1.0 - n as f64 / 2f64.powi(n as i32);
        let r = radii[n - 2];
        report.push(
            n,
            "gershgorin_row_n_minus_1",
            1,
            r,
            exact,
            CheckStatus::from_bool((r - exact).abs() <= 1e-12),
        );
        for j in 0..n.min(5) {
            report.push(
                n,
                "gershgorin_limit",
                j,
                radii[n - 1 - j],
                central_binomial_limit(j),
                CheckStatus::Reported,
            );
        }
        let max_radius = radii.iter().cloned().fold(0.0, f64::max);
        report.push(
            n,
            "gershgorin_bound",
            0,
            l1,
            max_radius,
            CheckStatus::from_bool(l1 <= max_radius + MONOTONE_TOL),
        );

        let v = normalize_phase(&vectors.column(0).clone_owned());
        let gaps: Vec<f64> = (0..n - 1).map(|j| v[j + 1].norm() - v[j].norm()).collect();
        let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        report.push(
            n,
            "moduli_increasing",
            0,
            min_gap,
            0.0,
            CheckStatus::from_bool(min_gap > -MONOTONE_TOL),
        );

        let mut worst_interlace: f64 = 0.0;
        let mut minor_tops = Vec::with_capacity(n);
        for j in 1..=n {
            let minor = principal_minor(&a, j)?;
            let (mu, _) = hermitian_eigen(&minor);
            for k in 0..n - 1 {
                worst_interlace = worst_interlace
                    .max(mu[k] - values[k])
                    .max(values[k + 1] - mu[k]);
            }
            minor_tops.push(mu[0]);
        }
        report.push(
            n,
            "interlacing",
            0,
            worst_interlace,
            INTERLACING_TOL,
            CheckStatus::from_bool(worst_interlace <= INTERLACING_TOL),
        );
        for j in 1..n {
            let ok = minor_tops[j] < minor_tops[j - 1] && minor_tops[j - 1] < l1;
            report.push(
                n,
                "minor_chain",
                j,
                minor_tops[j - 1],
                l1,
                CheckStatus::from_bool(ok),
            );
        }
        report.push(
            n,
            "phase_run",
            0,
            trailing_phase_run(&v) as f64,
            n as f64,
            CheckStatus::Reported,
        );
    }

    for &(n, l) in multi_sensor {
        let net = PropagationNetwork::new(n, 2, -1.0, 1.0)?;
        let q = q_second_regime_multi_sensor(&net, l, 1.0)?;
        let spectrum = skew_eigendecomposition(q.matrix())?;
        let v = &spectrum.leading_eigenvector;
        let anchor = v[n - l];
        let rel: Vec<f64> = v.iter().map(|z| principal_arg(z / anchor)).collect();
        let mut ordered = rel[n - l] == 0.0;
        let mut previous = 0.0;
        for &phase in &rel[n - l + 1..] {
            ordered &= phase < previous - MONOTONE_TOL && phase > -PI;
            previous = phase;
        }
        report.push(
            n,
            "multi_phase_order",
            l,
            rel[n - 1],
            0.0,
            CheckStatus::from_bool(ordered),
        );

        let m = &spectrum.moduli;
        let rising = (0..n - l).all(|k| m[k] < m[k + 1] + MONOTONE_TOL);
        let falling = (n - l..n - 1).all(|k| m[k] > m[k + 1] - MONOTONE_TOL);
        let argmax = (0..n)
            .max_by(|&a, &b| m[a].total_cmp(&m[b]))
            .expect("non-empty")
            + 1;
        report.push(
            n,
            "multi_moduli_peak",
            l,
            argmax as f64,
            (n - l + 1) as f64,
            CheckStatus::from_bool(rising && falling),
        );
    }
    Ok(report)
}
