//! The experiments behind the command-line front end.
//!
//! Each experiment validates its configuration, computes a [`ResultTable`]
//! and a JSON summary, and leaves the shared metadata to [`run_experiment`].
//! Parallel work is collected in input order, so the table depends only on
//! the configuration and the seed.

use std::f64::consts::FRAC_2_PI;
use std::time::Instant;

use cyclicity_core::circulant::CirculantSpec;
use cyclicity_core::coom::{
    coom_lead_matrix, one_harmonic_vectors, phase_order_recovery, PeriodicCoom,
};
use cyclicity_core::cyclic_lead::{
    binomial_matrix, numeric_conjecture_checks, q_all_sensors, q_multi_sensor, q_one_sensor,
    NoiseSpec, PropagationNetwork,
};
use cyclicity_core::linalg::{hermitian_eigen, Mat};
use cyclicity_core::ou::{theoretical_lead_matrix, OuParams};
use cyclicity_core::simulate::{
    step_ratio, streamed_time_averaged_leads, Initial, SimConfig, GAUSSIAN_METHOD, RNG_ID,
};
use cyclicity_core::spectral::{
    gershgorin_radii, largest_hermitian_eigenvalue, principal_minor, skew_eigendecomposition,
};
use cyclicity_core::LeadMatrix;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, ExperimentKind, NoiseConfig};
use crate::error::{CliError, Result};
use crate::table::{require_skew, Cell, ResultTable};

/// Largest dimension accepted by the binomial-matrix experiments.
pub const MAX_BINOMIAL_DIMENSION: usize = 512;

/// Largest dimension accepted by the conjecture report.
pub const MAX_CONJECTURE_DIMENSION: usize = 64;

/// Seed used by simulation experiments when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Default perturbations of the regime sweep.
pub const DEFAULT_EPSILONS: [f64; 6] = [1e-11, 1e-10, 1e-1, 1.0, 1e3, 1e4];

/// Default circulant friction row of the strong-law experiment.
pub const DEFAULT_FRICTION: [f64; 5] = [2.1, -0.2, -0.4, -0.6, -0.8];

struct Outcome {
    table: ResultTable,
    summary: Map<String, Value>,
    seed: Option<u64>,
    step_ratio: Option<f64>,
}

/// JSON number for finite values, string otherwise.
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(x.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Runs an experiment and attaches the metadata: experiment name, seed, RNG
/// and normal-deviate identifiers, crate versions, wall time, the
/// forward-Euler ratio `Δ · max|eig B|` (null without simulation), the
/// configuration and the summary.
pub fn run_experiment(
    kind: ExperimentKind,
    config: &ExperimentConfig,
    seed: Option<u64>,
) -> Result<ResultTable> {
    let start = Instant::now();
    let seed = seed.or(config.seed);
    let outcome = match kind {
        ExperimentKind::LambdaLimit => lambda_limit(config)?,
        ExperimentKind::Minors => minors(config)?,
        ExperimentKind::Gershgorin => gershgorin(config)?,
        ExperimentKind::SllnScatter => slln_scatter(config, seed.unwrap_or(DEFAULT_SEED))?,
        ExperimentKind::RegimeSweep => regime_sweep(config, seed.unwrap_or(DEFAULT_SEED))?,
        ExperimentKind::CoomDemo => coom_demo(config)?,
        ExperimentKind::ConjectureReport => conjecture_report(config)?,
    };
    let mut table = outcome.table;
    let meta = &mut table.metadata;
    meta.insert("experiment".into(), json!(kind.name()));
    meta.insert(
        "seed".into(),
        outcome.seed.map_or(Value::Null, |s| json!(s)),
    );
    meta.insert("rng".into(), json!(RNG_ID));
    meta.insert("gaussian_method".into(), json!(GAUSSIAN_METHOD));
    meta.insert(
        "versions".into(),
        json!({"cyclicity-core": cyclicity_core::VERSION, "cyclicity-cli": env!("CARGO_PKG_VERSION")}),
    );
    meta.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
    meta.insert(
        "step_ratio".into(),
        outcome.step_ratio.map_or(Value::Null, json_f64),
    );
    meta.insert("config".into(), serde_json::to_value(config)?);
    meta.insert("summary".into(), Value::Object(outcome.summary));
    Ok(table)
}

fn dimensions(config: &ExperimentConfig, default: Vec<usize>, max: usize) -> Result<Vec<usize>> {
    let dims = config.dimensions.clone().unwrap_or(default);
    if dims.is_empty() {
        return Err(invalid("`dimensions` must not be empty"));
    }
    if let Some(bad) = dims.iter().find(|&&n| n < 2 || n > max) {
        return Err(invalid(format!("dimension {bad} outside 2..={max}")));
    }
    Ok(dims)
}

fn lambda_limit(config: &ExperimentConfig) -> Result<Outcome> {
    config.require_only(ExperimentKind::LambdaLimit, &["dimensions"])?;
    let dims = dimensions(config, (20..=24).collect(), MAX_BINOMIAL_DIMENSION)?;
    let values: Vec<Result<f64>> = dims
        .par_iter()
        .map(|&n| Ok(largest_hermitian_eigenvalue(&binomial_matrix(n)?)))
        .collect();
    let mut table = ResultTable::new(["n", "lambda1", "distance_to_two_over_pi"]);
    for (&n, l1) in dims.iter().zip(values) {
        let l1 = l1?;
        table.push(vec![n.into(), l1.into(), (FRAC_2_PI - l1).into()])?;
    }
    let mut summary = Map::new();
    summary.insert("two_over_pi".into(), json!(FRAC_2_PI));
    Ok(Outcome {
        table,
        summary,
        seed: None,
        step_ratio: None,
    })
}

fn minors(config: &ExperimentConfig) -> Result<Outcome> {
    config.require_only(ExperimentKind::Minors, &["n"])?;
    let n = config.n.unwrap_or(10);
    if !(2..=MAX_BINOMIAL_DIMENSION).contains(&n) {
        return Err(invalid(format!(
            "n = {n} outside 2..={MAX_BINOMIAL_DIMENSION}"
        )));
    }
    let a = binomial_matrix(n)?;
    let (full, _) = hermitian_eigen(&a);
    let rows: Vec<Result<(f64, f64)>> = (1..=n)
        .into_par_iter()
        .map(|j| {
            let (mu, _) = hermitian_eigen(&principal_minor(&a, j)?);
            let worst = (0..n - 1)
                .map(|k| (mu[k] - full[k]).max(full[k + 1] - mu[k]))
                .fold(0.0, f64::max);
            Ok((mu[0], worst))
        })
        .collect();
    let mut table = ResultTable::new(["j", "lambda1_minor", "lambda1_full"]);
    let mut worst_interlacing: f64 = 0.0;
    for (j, row) in (1..=n).zip(rows) {
        let (top, worst) = row?;
        worst_interlacing = worst_interlacing.max(worst);
        table.push(vec![j.into(), top.into(), full[0].into()])?;
    }
    let mut summary = Map::new();
    summary.insert("max_interlacing_violation".into(), json!(worst_interlacing));
    Ok(Outcome {
        table,
        summary,
        seed: None,
        step_ratio: None,
    })
}

fn gershgorin(config: &ExperimentConfig) -> Result<Outcome> {
    config.require_only(ExperimentKind::Gershgorin, &["dimensions"])?;
    let dims = dimensions(config, (4..=64).collect(), MAX_BINOMIAL_DIMENSION)?;
    let radii: Vec<Result<Vec<f64>>> = dims
        .par_iter()
        .map(|&n| Ok(gershgorin_radii(&binomial_matrix(n)?)))
        .collect();
    let mut table = ResultTable::new(["n", "j", "radius", "closed_form"]);
    let mut worst: f64 = 0.0;
    for (&n, r) in dims.iter().zip(radii) {
        let r = r?;
        for (j, radius) in r.iter().enumerate() {
            let closed = if j + 2 == n {
                let exact = 1.0 - n as f64 / 2f64.powi(n as i32);
                worst = worst.max((radius - exact).abs());
                Cell::Real(exact)
            } else {
                Cell::Text(String::new())
            };
            table.push(vec![n.into(), (j + 1).into(), (*radius).into(), closed])?;
        }
    }
    let mut summary = Map::new();
    summary.insert("max_row_n_minus_1_deviation".into(), json!(worst));
    Ok(Outcome {
        table,
        summary,
        seed: None,
        step_ratio: None,
    })
}

fn positive_list<T: Copy + PartialOrd + Default + std::fmt::Display>(
    name: &str,
    v: &[T],
) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(format!("`{name}` must not be empty")));
    }
    if let Some(bad) = v
        .iter()
        .find(|x| x.partial_cmp(&&T::default()) != Some(std::cmp::Ordering::Greater))
    {
        return Err(invalid(format!(
            "`{name}` entries must be positive, got {bad}"
        )));
    }
    Ok(())
}

fn slln_scatter(config: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    config.require_only(
        ExperimentKind::SllnScatter,
        &["friction", "sigma", "iterations", "steps", "replicates"],
    )?;
    let row = config
        .friction
        .clone()
        .unwrap_or_else(|| DEFAULT_FRICTION.to_vec());
    let spec = CirculantSpec::new(row)?;
    let n = spec.n();
    let sigma = config.sigma.unwrap_or(1.0);
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(invalid(format!(
            "sigma must be finite and >= 0, got {sigma}"
        )));
    }
    let ks = config
        .iterations
        .clone()
        .unwrap_or_else(|| vec![101, 1_001, 10_001, 100_001, 1_000_001]);
    positive_list("iterations", &ks)?;
    if let Some(bad) = ks.iter().find(|&&k| k < 2) {
        return Err(invalid(format!("iteration counts must be >= 2, got {bad}")));
    }
    let steps = config.steps.clone().unwrap_or_else(|| vec![0.1, 0.01]);
    positive_list("steps", &steps)?;
    let replicates = config.replicates.unwrap_or(1);
    if replicates == 0 {
        return Err(invalid("`replicates` must be positive"));
    }
    let b = spec.dense();
    let params = OuParams::new(b.clone(), Mat::identity(n, n) * sigma)?;
    let q = theoretical_lead_matrix(&b, &params.diffusion())?;
    require_skew("theoretical lead", q.matrix())?;
    let q_norm = q.matrix().norm();
    let k_max = *ks.iter().max().expect("non-empty");
    let tasks: Vec<(u64, f64)> = (0..replicates as u64)
        .flat_map(|r| steps.iter().map(move |&s| (seed.wrapping_add(r), s)))
        .collect();
    let results: Vec<Result<Vec<(usize, LeadMatrix)>>> = tasks
        .par_iter()
        .map(|&(s, step)| {
            let cfg = SimConfig::new(k_max, step, s, Initial::Stationary)?;
            Ok(streamed_time_averaged_leads(&params, &cfg, &ks)?)
        })
        .collect();
    let mut table = ResultTable::new([
        "seed",
        "step",
        "iterations",
        "row",
        "col",
        "empirical",
        "theoretical",
        "relative_error",
    ]);
    let mut errors: Vec<Value> = Vec::new();
    for (&(s, step), leads) in tasks.iter().zip(results) {
        for (k, lead) in leads? {
            let a = lead.matrix();
            require_skew("time-averaged lead", a)?;
            let err = (a - q.matrix()).norm();
            let relative = if q_norm > 0.0 { err / q_norm } else { err };
            errors.push(
                json!({"seed": s, "step": step, "iterations": k, "relative_error": relative}),
            );
            for i in 0..n {
                for j in i + 1..n {
                    table.push(vec![
                        s.into(),
                        step.into(),
                        k.into(),
                        (i + 1).into(),
                        (j + 1).into(),
                        a[(i, j)].into(),
                        q.matrix()[(i, j)].into(),
                        relative.into(),
                    ])?;
                }
            }
        }
    }
    let ratio = steps.iter().map(|&s| step_ratio(&b, s)).fold(0.0, f64::max);
    let mut summary = Map::new();
    summary.insert("errors".into(), Value::Array(errors));
    summary.insert(
        "relative_to".into(),
        json!(if q_norm > 0.0 {
            "frobenius norm of Q"
        } else {
            "absolute"
        }),
    );
    Ok(Outcome {
        table,
        summary,
        seed: Some(seed),
        step_ratio: Some(ratio),
    })
}

/// Leading-eigenvector data of one lead matrix in the regime sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Perturbation `ε`.
    pub epsilon: f64,
    /// `|λ1/λ3|`.
    pub ratio: f64,
    /// Imaginary part of `λ1`.
    pub lambda1: f64,
    /// Eigenvalue moduli in descending order.
    pub eigenvalue_moduli: Vec<f64>,
    /// Real parts of the leading eigenvector.
    pub re: Vec<f64>,
    /// Imaginary parts of the leading eigenvector.
    pub im: Vec<f64>,
    /// Component moduli.
    pub moduli: Vec<f64>,
    /// Component phases in `(-π, π]`.
    pub phases: Vec<f64>,
}

impl SweepPoint {
    fn from_lead(epsilon: f64, lead: &LeadMatrix) -> Result<Self> {
        require_skew("lead", lead.matrix())?;
        let s = skew_eigendecomposition(lead.matrix())?;
        Ok(Self {
            epsilon,
            ratio: s.ratio()?,
            lambda1: s.leading_eigenvalue().im,
            eigenvalue_moduli: s.eigenvalues.iter().map(|z| z.norm()).collect(),
            re: s.leading_eigenvector.iter().map(|z| z.re).collect(),
            im: s.leading_eigenvector.iter().map(|z| z.im).collect(),
            moduli: s.moduli.clone(),
            phases: s.phases.clone(),
        })
    }

    /// Sum of squared moduli of the last `count` components.
    pub fn trailing_mass(&self, count: usize) -> f64 {
        let n = self.moduli.len();
        self.moduli[n.saturating_sub(count)..]
            .iter()
            .map(|m| m * m)
            .sum()
    }

    /// One-based index of the largest-modulus component.
    pub fn argmax_modulus(&self) -> usize {
        (0..self.moduli.len()).fold(0, |b, i| {
            if self.moduli[i] > self.moduli[b] {
                i
            } else {
                b
            }
        }) + 1
    }
}

fn noise_spec(noise: NoiseConfig) -> NoiseSpec {
    match noise {
        NoiseConfig::OneSensor { sensor, variance } => NoiseSpec::OneSensor { sensor, variance },
        NoiseConfig::Trailing { count, variance } => NoiseSpec::Trailing { count, variance },
        NoiseConfig::All { variance } => NoiseSpec::All { variance },
    }
}

fn closed_form_lead(net: &PropagationNetwork, noise: NoiseSpec) -> Result<LeadMatrix> {
    Ok(match noise {
        NoiseSpec::OneSensor { sensor, variance } => q_one_sensor(net, sensor, variance)?,
        NoiseSpec::Trailing { count, variance } => q_multi_sensor(net, count, variance)?,
        NoiseSpec::All { variance } => q_all_sensors(net, variance)?.lead,
    })
}

fn regime_sweep(config: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    config.require_only(
        ExperimentKind::RegimeSweep,
        &["n", "p", "b_p", "epsilons", "noise", "empirical"],
    )?;
    let n = config.n.unwrap_or(100);
    let p = config.p.unwrap_or(2);
    let b_p = config.b_p.unwrap_or(-1.0);
    let epsilons = config
        .epsilons
        .clone()
        .unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    positive_list("epsilons", &epsilons)?;
    let noise = noise_spec(config.noise.unwrap_or(NoiseConfig::OneSensor {
        sensor: n,
        variance: 1.0,
    }));
    noise.validate(n)?;
    let networks: Vec<PropagationNetwork> = epsilons
        .iter()
        .map(|&e| PropagationNetwork::new(n, p, b_p, e))
        .collect::<std::result::Result<_, _>>()?;
    let theoretical: Vec<Result<SweepPoint>> = networks
        .par_iter()
        .map(|net| SweepPoint::from_lead(net.epsilon(), &closed_form_lead(net, noise)?))
        .collect();
    let theoretical: Vec<SweepPoint> = theoretical.into_iter().collect::<Result<_>>()?;

    let mut empirical = Vec::new();
    let mut ratio_meta = None;
    if let Some(emp) = config.empirical {
        let d = noise.diffusion(n)?;
        let volatility = d.map(|x| (2.0 * x).sqrt());
        let cfgs: Vec<SimConfig> = (0..networks.len())
            .map(|i| {
                SimConfig::new(
                    emp.iterations,
                    emp.step,
                    seed.wrapping_add(i as u64),
                    Initial::Zero,
                )
            })
            .collect::<std::result::Result<_, _>>()?;
        ratio_meta = Some(
            networks
                .iter()
                .map(|net| step_ratio(&net.friction().dense(), emp.step))
                .fold(0.0, f64::max),
        );
        let points: Vec<Result<SweepPoint>> = networks
            .par_iter()
            .zip(cfgs.par_iter())
            .map(|(net, cfg)| {
                let params = OuParams::new(net.friction().dense(), volatility.clone())?;
                let leads = streamed_time_averaged_leads(&params, cfg, &[cfg.iterations()])?;
                SweepPoint::from_lead(net.epsilon(), &leads[0].1)
            })
            .collect();
        empirical = points.into_iter().collect::<Result<_>>()?;
    }

    let mut table = ResultTable::new([
        "source",
        "epsilon",
        "index",
        "eigenvalue_modulus",
        "re_v1",
        "im_v1",
        "modulus",
        "phase",
        "ratio",
        "lambda1",
    ]);
    for (source, points) in [("theoretical", &theoretical), ("empirical", &empirical)] {
        for pt in points.iter() {
            for k in 0..n {
                table.push(vec![
                    source.into(),
                    pt.epsilon.into(),
                    (k + 1).into(),
                    pt.eigenvalue_moduli[k].into(),
                    pt.re[k].into(),
                    pt.im[k].into(),
                    pt.moduli[k].into(),
                    pt.phases[k].into(),
                    pt.ratio.into(),
                    pt.lambda1.into(),
                ])?;
            }
        }
    }
    let mut summary = Map::new();
    let describe = |points: &[SweepPoint]| -> Value {
        let ratios: Vec<Value> = points.iter().map(|p| json_f64(p.ratio)).collect();
        let increasing = points.windows(2).all(|w| w[1].ratio > w[0].ratio);
        json!({"ratios": ratios, "ratio_increasing": increasing})
    };
    summary.insert("theoretical".into(), describe(&theoretical));
    if !empirical.is_empty() {
        summary.insert("empirical".into(), describe(&empirical));
    }
    Ok(Outcome {
        table,
        summary,
        seed: config.empirical.map(|_| seed),
        step_ratio: ratio_meta,
    })
}

fn coom_demo(config: &ExperimentConfig) -> Result<Outcome> {
    config.require_only(ExperimentKind::CoomDemo, &["n", "samples"])?;
    let n = config.n.unwrap_or(10);
    if !(2..=4096).contains(&n) {
        return Err(invalid(format!("n = {n} outside 2..=4096")));
    }
    let samples = config.samples.unwrap_or(1 << 14);
    if samples < 2 {
        return Err(invalid(format!("samples = {samples} must be >= 2")));
    }
    let model = PeriodicCoom::sinusoid_network(n)?;
    let lead = coom_lead_matrix(&model)?;
    require_skew("lead", lead.matrix())?;
    let sampled = model.sample_period(samples)?.lead_matrix()?;
    let sampling_error = (lead.matrix() - sampled.matrix()).amax();
    let (a, b) = one_harmonic_vectors(&model)?;
    let spectrum = skew_eigendecomposition(lead.matrix())?;
    let recovery = phase_order_recovery(&lead)?;
    let identity: Vec<usize> = (1..=n).collect();
    let matched = recovery.compare(&identity);

    let mut columns: Vec<String> = [
        "component",
        "offset",
        "a",
        "b",
        "re_v1",
        "im_v1",
        "modulus",
        "phase",
        "recovered_order",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    columns.extend((1..=n).map(|j| format!("lead_{j}")));
    let mut table = ResultTable::new(columns);
    let v = &spectrum.leading_eigenvector;
    for i in 0..n {
        let mut row = vec![
            (i + 1).into(),
            model.offsets()[i].into(),
            a[i].into(),
            b[i].into(),
            v[i].re.into(),
            v[i].im.into(),
            spectrum.moduli[i].into(),
            spectrum.phases[i].into(),
            recovery.order[i].into(),
        ];
        row.extend((0..n).map(|j| Cell::Real(lead.matrix()[(i, j)])));
        table.push(row)?;
    }
    let mut summary = Map::new();
    summary.insert("ratio".into(), recovery.ratio.map_or(Value::Null, json_f64));
    summary.insert("lambda1".into(), json!(recovery.leading_eigenvalue.im));
    summary.insert("max_sampling_error".into(), json!(sampling_error));
    summary.insert("samples".into(), json!(samples));
    summary.insert(
        "recovery".into(),
        match matched {
            Some(m) => json!({"matches_offsets": true, "orientation": m.orientation.label(), "shift": m.shift}),
            None => json!({"matches_offsets": false}),
        },
    );
    Ok(Outcome {
        table,
        summary,
        seed: None,
        step_ratio: None,
    })
}

fn conjecture_report(config: &ExperimentConfig) -> Result<Outcome> {
    config.require_only(
        ExperimentKind::ConjectureReport,
        &["dimensions", "multi_sensor"],
    )?;
    let dims = dimensions(config, (2..=64).collect(), MAX_CONJECTURE_DIMENSION)?;
    let multi = config.multi_sensor.clone().unwrap_or_else(|| vec![(10, 4)]);
    if let Some(bad) = multi
        .iter()
        .find(|&&(n, l)| !(3..=MAX_CONJECTURE_DIMENSION).contains(&n) || l == 0 || l + 1 >= n)
    {
        return Err(invalid(format!(
            "multi-sensor pair {bad:?} needs 1 <= L < N - 1 and N <= {MAX_CONJECTURE_DIMENSION}"
        )));
    }
    let report = numeric_conjecture_checks(&dims, &multi)?;
    let mut table = ResultTable::new(["n", "check", "index", "measured", "reference", "status"]);
    let mut counts: Map<String, Value> = Map::new();
    for row in &report.rows {
        table.push(vec![
            row.n.into(),
            row.check.into(),
            row.index.into(),
            row.measured.into(),
            row.reference.into(),
            row.status.label().into(),
        ])?;
        let entry = counts
            .entry(row.check.to_string())
            .or_insert_with(|| json!({"rows": 0, "violations": 0}));
        entry["rows"] = json!(entry["rows"].as_u64().unwrap_or(0) + 1);
        if row.status == cyclicity_core::cyclic_lead::CheckStatus::Violated {
            entry["violations"] = json!(entry["violations"].as_u64().unwrap_or(0) + 1);
        }
    }
    let mut summary = Map::new();
    summary.insert("checks".into(), Value::Object(counts));
    Ok(Outcome {
        table,
        summary,
        seed: None,
        step_ratio: None,
    })
}
