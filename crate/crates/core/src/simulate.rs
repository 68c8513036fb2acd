//! Euler–Maruyama realisations of the OU process and empirical lead matrices.
//!
//! Randomness comes from a seeded ChaCha20 stream turned into standard normal
//! draws by the Box–Muller transform. A run draws the initial state first (when
//! it is random) and then one block of `M` normals per step, so the seed fixes
//! every sample bit for bit. Lead matrices are accumulated with the shoelace
//! formula, either from a stored [`TimeSeries`] or streamed during simulation.

use nalgebra::DVector;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::lead::{LeadKind, LeadMatrix};
use crate::linalg::{psd_sqrt, spectral_radius, Mat};
use crate::ou::{
    check_stability, require_psd, stationary_covariance, theoretical_lead_matrix, OuParams,
};

/// Identifier of the pseudo-random generator recorded in experiment metadata.
pub const RNG_ID: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

/// Identifier of the normal-deviate method recorded in experiment metadata.
pub const GAUSSIAN_METHOD: &str = "Box-Muller on 53-bit uniforms in (0,1]";

/// Largest accepted value of `Δ · max|eig B|`.
pub const MAX_STEP_RATIO: f64 = 2.0;

/// Seeded stream of uniform and standard normal deviates.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    /// Creates the stream for `seed`.
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform deviate in `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Vector of `len` independent standard normal deviates.
    pub fn gaussian_vector(&mut self, len: usize) -> DVector<f64> {
        DVector::from_fn(len, |_, _| self.gaussian())
    }
}

/// Starting state of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    /// A draw from the stationary distribution `N(0, S)`.
    Stationary,
    /// The origin.
    Zero,
    /// A fixed state.
    Given(Vec<f64>),
}

/// Iteration count, step size, seed and initial state of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    iterations: usize,
    step: f64,
    seed: u64,
    initial: Initial,
}

impl SimConfig {
    /// Validates `K >= 2` and `Δ > 0`.
    pub fn new(iterations: usize, step: f64, seed: u64, initial: Initial) -> Result<Self> {
        if iterations < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 iterations, got {iterations}"
            )));
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::InvalidInput(format!(
                "time step must be finite and > 0, got {step}"
            )));
        }
        if let Initial::Given(x) = &initial {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("initial state must be finite".into()));
            }
        }
        Ok(Self {
            iterations,
            step,
            seed,
            initial,
        })
    }

    /// Number of samples `K`, including the initial state.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Time step `Δ`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Seed of the random stream.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Initial state rule.
    pub fn initial(&self) -> &Initial {
        &self.initial
    }
}

/// `K` samples of an `N`-dimensional signal at spacing `Δ`, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Mat,
    step: f64,
}

impl TimeSeries {
    /// Wraps a `K x N` sample array after checking that it is finite and
    /// non-empty.
    pub fn new(samples: Mat, step: f64) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(Error::InvalidInput("time series must be non-empty".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "time series has non-finite samples".into(),
            ));
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::InvalidInput(format!(
                "time step must be finite and > 0, got {step}"
            )));
        }
        Ok(Self { samples, step })
    }

    /// The `K x N` sample array.
    pub fn samples(&self) -> &Mat {
        &self.samples
    }

    /// Time step `Δ`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of samples `K`.
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    /// Whether the series holds no samples; never true for a constructed value.
    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    /// Signal dimension `N`.
    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }
}

/// Draws `S^{1/2} z` with `z` standard normal, using the symmetric
/// eigen square root so that singular covariances are accepted.
pub fn sample_stationary_initial(s: &Mat, source: &mut GaussianSource) -> Result<DVector<f64>> {
    let n = s.nrows();
    require_psd(s, n, "stationary covariance")?;
    let z = source.gaussian_vector(n);
    Ok(psd_sqrt(s) * z)
}

/// Forward-Euler stability ratio `Δ · max|eig B|`.
pub fn step_ratio(b: &Mat, step: f64) -> f64 {
    step * spectral_radius(b)
}

/// Running shoelace sum `(1/2) Σ (x_k x_{k+1}ᵀ - x_{k+1} x_kᵀ)`.
#[derive(Debug, Clone)]
pub struct LeadAccumulator {
    sum: Mat,
    previous: Option<DVector<f64>>,
    samples: usize,
}

impl LeadAccumulator {
    /// Empty accumulator for `N`-dimensional samples.
    pub fn new(n: usize) -> Self {
        Self {
            sum: Mat::zeros(n, n),
            previous: None,
            samples: 0,
        }
    }

    /// Appends one sample.
    pub fn push(&mut self, x: &DVector<f64>) {
        if let Some(p) = &self.previous {
            let n = x.len();
            for j in 1..n {
                for i in 0..j {
                    self.sum[(i, j)] += 0.5 * (p[i] * x[j] - x[i] * p[j]);
                }
            }
            self.previous.as_mut().expect("present").copy_from(x);
        } else {
            self.previous = Some(x.clone());
        }
        self.samples += 1;
    }

    /// Number of samples pushed so far.
    pub fn samples(&self) -> usize {
        self.samples
    }

    /// The accumulated lead matrix.
    pub fn lead(&self) -> Result<LeadMatrix> {
        if self.samples < 2 {
            return Err(Error::InvalidInput(format!(
                "lead matrix needs at least 2 samples, got {}",
                self.samples
            )));
        }
        LeadMatrix::new(&self.sum - self.sum.transpose(), LeadKind::Empirical)
    }

    /// The accumulated lead matrix divided by the elapsed time `(K-1)Δ`.
    pub fn time_average(&self, step: f64) -> Result<LeadMatrix> {
        let a = self.lead()?;
        let elapsed = (self.samples - 1) as f64 * step;
        LeadMatrix::new(a.into_matrix() / elapsed, LeadKind::Empirical)
    }
}

/// Shoelace lead matrix of a time series.
pub fn empirical_lead_matrix(ts: &TimeSeries) -> Result<LeadMatrix> {
    let mut acc = LeadAccumulator::new(ts.dim());
    for k in 0..ts.len() {
        acc.push(&ts.samples.row(k).transpose());
    }
    acc.lead()
}

/// Shoelace lead matrix divided by the elapsed time `(K-1)Δ`.
pub fn time_averaged_lead(ts: &TimeSeries) -> Result<LeadMatrix> {
    let a = empirical_lead_matrix(ts)?;
    let elapsed = (ts.len() - 1) as f64 * ts.step;
    LeadMatrix::new(a.into_matrix() / elapsed, LeadKind::Empirical)
}

/// Euler–Maruyama stepper `x_{k+1} = x_k - ΔBx_k + Σξ_k`, `ξ_k ~ N(0, ΔI)`.
struct Stepper {
    propagator: Mat,
    noise: Mat,
    source: GaussianSource,
    state: DVector<f64>,
    m: usize,
}

impl Stepper {
    fn new(params: &OuParams, cfg: &SimConfig) -> Result<Self> {
        let b = params.friction();
        let n = params.n();
        let stability = check_stability(b)?;
        if !stability.stable {
            return Err(Error::Unstable {
                margin: stability.margin,
            });
        }
        let ratio = step_ratio(b, cfg.step);
        if ratio >= MAX_STEP_RATIO {
            return Err(Error::StepSize { ratio });
        }
        let mut source = GaussianSource::new(cfg.seed);
        let state = match &cfg.initial {
            Initial::Zero => DVector::zeros(n),
            Initial::Given(x) => {
                if x.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "initial state has length {}, expected {n}",
                        x.len()
                    )));
                }
                DVector::from_column_slice(x)
            }
            Initial::Stationary => {
                let s = stationary_covariance(b, &params.diffusion())?;
                sample_stationary_initial(&s, &mut source)?
            }
        };
        Ok(Self {
            propagator: Mat::identity(n, n) - b * cfg.step,
            noise: params.volatility() * cfg.step.sqrt(),
            source,
            state,
            m: params.volatility().ncols(),
        })
    }

    fn advance(&mut self) -> Result<()> {
        let xi = self.source.gaussian_vector(self.m);
        self.state = &self.propagator * &self.state + &self.noise * xi;
        if self.state.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(
                "Euler-Maruyama state became non-finite".into(),
            ));
        }
        Ok(())
    }
}

/// Simulates `K` samples (the initial state and `K - 1` steps) and stores them.
pub fn euler_maruyama(params: &OuParams, cfg: &SimConfig) -> Result<TimeSeries> {
    let mut stepper = Stepper::new(params, cfg)?;
    let mut samples = Mat::zeros(cfg.iterations, params.n());
    samples.row_mut(0).copy_from(&stepper.state.transpose());
    for k in 1..cfg.iterations {
        stepper.advance()?;
        samples.row_mut(k).copy_from(&stepper.state.transpose());
    }
    TimeSeries::new(samples, cfg.step)
}

/// Simulates without storing samples and returns the time-averaged lead
/// matrix after each sample count listed in `checkpoints`. Checkpoints above
/// `K` are rejected; the realisation is identical to [`euler_maruyama`].
pub fn streamed_time_averaged_leads(
    params: &OuParams,
    cfg: &SimConfig,
    checkpoints: &[usize],
) -> Result<Vec<(usize, LeadMatrix)>> {
    let mut sorted = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&k| k < 2 || k > cfg.iterations) {
        return Err(Error::InvalidInput(format!(
            "checkpoint {bad} outside 2..={}",
            cfg.iterations
        )));
    }
    let mut stepper = Stepper::new(params, cfg)?;
    let mut acc = LeadAccumulator::new(params.n());
    acc.push(&stepper.state);
    let mut out = Vec::with_capacity(sorted.len());
    let last = sorted.last().copied().unwrap_or(0);
    let mut next = sorted.iter().peekable();
    while acc.samples() < last {
        stepper.advance()?;
        acc.push(&stepper.state);
        if next.peek() == Some(&&acc.samples()) {
            out.push((acc.samples(), acc.time_average(cfg.step)?));
            next.next();
        }
    }
    Ok(out)
}

/// One row of a strong-law convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SllnRow {
    /// Seed of the realisation.
    pub seed: u64,
    /// Sample count `K`.
    pub iterations: usize,
    /// Time step `Δ`.
    pub step: f64,
    /// `|Â - Q|_F` for the time-averaged lead matrix `Â`.
    pub absolute_error: f64,
    /// `|Â - Q|_F / |Q|_F`, absent when `Q = 0`.
    pub relative_error: Option<f64>,
}

/// Runs one stationary-start realisation of length `max(ks)` and compares the
/// time-averaged lead matrix with `q` at every `K` in `ks`.
pub fn slln_run(
    params: &OuParams,
    q: &Mat,
    ks: &[usize],
    step: f64,
    seed: u64,
) -> Result<Vec<SllnRow>> {
    let k_max = ks
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::InvalidInput("empty K list".into()))?;
    let cfg = SimConfig::new(k_max, step, seed, Initial::Stationary)?;
    let q_norm = q.norm();
    Ok(streamed_time_averaged_leads(params, &cfg, ks)?
        .into_iter()
        .map(|(k, lead)| {
            let absolute_error = (lead.matrix() - q).norm();
            SllnRow {
                seed,
                iterations: k,
                step,
                absolute_error,
                relative_error: (q_norm > 0.0).then(|| absolute_error / q_norm),
            }
        })
        .collect())
}

/// Strong-law experiment over several seeds against the theoretical lead
/// matrix, rows ordered by seed and then by `K`.
pub fn slln_experiment(
    params: &OuParams,
    ks: &[usize],
    step: f64,
    seeds: &[u64],
) -> Result<Vec<SllnRow>> {
    let q = theoretical_lead_matrix(params.friction(), &params.diffusion())?;
    let mut rows = Vec::with_capacity(ks.len() * seeds.len());
    for &seed in seeds {
        rows.extend(slln_run(params, q.matrix(), ks, step, seed)?);
    }
    Ok(rows)
}
