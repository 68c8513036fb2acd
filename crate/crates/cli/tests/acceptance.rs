//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Criteria that cannot be met as stated are listed in [`UNATTAINABLE`] with
//! the reason. They still print FAIL; only they are exempt from the exit
//! status.

use std::f64::consts::{FRAC_2_PI, PI, TAU};
use std::time::{Duration, Instant};

use cyclicity_cli::{run_experiment, ExperimentConfig, ExperimentKind, ResultTable};
use cyclicity_core::circulant::{fourier_vector, CirculantSpec};
use cyclicity_core::coom::{
    coom_lead_matrix, cross_correlation, oriented_area, phase_order_recovery, PeriodicCoom,
};
use cyclicity_core::cyclic_lead::{
    cyclic_order_permutation, leading_mode_all_sensors, q_all_sensors, q_first_regime_one_sensor,
    q_multi_sensor, q_one_sensor, q_second_regime_one_sensor, v1_first_regime_limit, NoiseSpec,
    PropagationNetwork,
};
use cyclicity_core::index::gcd;
use cyclicity_core::linalg::{CVec, Mat};
use cyclicity_core::ou::{cyclic_lead_matrix, stationary_covariance, theoretical_lead_matrix};
use cyclicity_core::quadrature::gauss_legendre;
use cyclicity_core::simulate::GaussianSource;
use cyclicity_core::spectral::{
    cyclic_match, phase_aligned_residual, phase_argsort, skew_eigendecomposition,
};

/// Criteria that are unattainable as stated, with the reason.
const UNATTAINABLE: &[(u32, &str)] = &[(
    8,
    "(N,p) = (9,4) has gcd(p-1, N) = 3, so no q with q(p-1) = 1 mod N exists and the network is not a valid cyclic network",
)];

type Check = Result<(bool, String), String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).expect("valid acceptance config")
}

fn experiment(kind: ExperimentKind, json: &str, seed: Option<u64>) -> Result<ResultTable, String> {
    run_experiment(kind, &config(json), seed).map_err(|e| e.to_string())
}

fn text_column(table: &ResultTable, name: &str) -> Vec<String> {
    let idx = table.column_index(name).expect("column present");
    table.rows().iter().map(|r| r[idx].to_string()).collect()
}

fn real_column(table: &ResultTable, name: &str) -> Vec<f64> {
    table
        .column_f64(name)
        .expect("column present")
        .into_iter()
        .map(|v| v.unwrap_or(f64::NAN))
        .collect()
}

fn exp_scaled_series(a: &Mat, t: f64) -> Mat {
    let norm = (a * t).norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * (t / 2f64.powi(squarings));
    let n = a.nrows();
    let mut term = Mat::identity(n, n);
    let mut total = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        total += &term;
    }
    for _ in 0..squarings {
        total = &total * &total;
    }
    total
}

/// `2 ∫₀^∞ e^{-Bt} D e^{-Bᵀt} dt` by composite Gauss–Legendre with panel
/// doubling, the exponential coming from a scaled power series.
fn covariance_quadrature(b: &Mat, d: &Mat) -> Mat {
    let minus_b = -b;
    let mut horizon = 1.0;
    while exp_scaled_series(&minus_b, horizon).norm() >= 1e-14 {
        horizon *= 2.0;
    }
    let (x, w) = gauss_legendre(12);
    let n = b.nrows();
    let estimate = |panels: usize| {
        let h = horizon / panels as f64;
        let step = exp_scaled_series(&minus_b, h);
        let local: Vec<Mat> = x
            .iter()
            .map(|xi| exp_scaled_series(&minus_b, 0.5 * h * (xi + 1.0)))
            .collect();
        let mut left = Mat::identity(n, n);
        let mut total = Mat::zeros(n, n);
        for _ in 0..panels {
            for (g_local, wi) in local.iter().zip(&w) {
                let g = &left * g_local;
                total += &g * d * g.transpose() * (0.5 * h * wi);
            }
            left = &left * &step;
        }
        total * 2.0
    };
    let mut panels = 8;
    let mut previous = estimate(panels);
    loop {
        panels *= 2;
        let current = estimate(panels);
        if (&current - &previous).norm() < 1e-12 * current.norm() || panels >= 1 << 13 {
            return current;
        }
        previous = current;
    }
}

fn uniform(rng: &mut GaussianSource, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

fn below(rng: &mut GaussianSource, n: usize) -> usize {
    ((rng.uniform() * n as f64).ceil() as usize).clamp(1, n) - 1
}

fn random_psd(rng: &mut GaussianSource, n: usize) -> Mat {
    let m = Mat::from_fn(n, n, |_, _| uniform(rng, -1.0, 1.0));
    &m * m.transpose() * 0.5
}

fn stable_circulant(rng: &mut GaussianSource, n: usize) -> CirculantSpec {
    let mut row: Vec<f64> = (0..n).map(|_| -uniform(rng, 0.0, 1.0)).collect();
    let off: f64 = row[1..].iter().sum();
    row[0] = -off + uniform(rng, 0.2, 1.2);
    CirculantSpec::new(row).expect("valid row")
}

fn coprime_networks(max_n: usize) -> Vec<(usize, usize)> {
    (2..=max_n)
        .flat_map(|n| {
            (2..=n)
                .filter(move |&p| gcd(p - 1, n) == 1)
                .map(move |p| (n, p))
        })
        .collect()
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn leading_vector(m: &Mat) -> Result<CVec, String> {
    Ok(skew_eigendecomposition(m)
        .map_err(|e| e.to_string())?
        .leading_eigenvector)
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn c1_lyapunov_vs_quadrature() -> Check {
    let start = Instant::now();
    let mut rng = GaussianSource::new(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = 2 + below(&mut rng, 9);
        let b = stable_circulant(&mut rng, n).dense();
        let d = random_psd(&mut rng, n);
        let s = stationary_covariance(&b, &d).map_err(|e| e.to_string())?;
        let oracle = covariance_quadrature(&b, &d);
        worst = worst.max((&s - &oracle).norm() / oracle.norm());
    }
    let elapsed = start.elapsed();
    Ok((
        worst < 1e-6 && within(elapsed, 10.0),
        format!(
            "max relative Frobenius {worst:.2e} (< 1e-6), {:.2} s (< 10 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn c2_equivalence_web() -> Check {
    let start = Instant::now();
    let mut rng = GaussianSource::new(2);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let err = |e: cyclicity_core::Error| e.to_string();
    for (n, p) in coprime_networks(12) {
        let net = PropagationNetwork::new(
            n,
            p,
            -uniform(&mut rng, 0.2, 2.0),
            uniform(&mut rng, 0.05, 3.0),
        )
        .map_err(err)?;
        let b = net.friction().dense();
        let d = random_psd(&mut rng, n);
        let general = cyclic_lead_matrix(&net.friction(), &d).map_err(err)?;
        let theory = theoretical_lead_matrix(&b, &d).map_err(err)?;
        worst = worst.max((general.matrix() - theory.matrix()).norm());
        let s = 1 + below(&mut rng, n);
        let variance = uniform(&mut rng, 0.5, 2.0);
        let count_l = 1 + below(&mut rng, n);
        let cases = [
            (
                NoiseSpec::OneSensor {
                    sensor: s,
                    variance,
                },
                q_one_sensor(&net, s, variance).map_err(err)?,
            ),
            (
                NoiseSpec::Trailing {
                    count: count_l,
                    variance,
                },
                q_multi_sensor(&net, count_l, variance).map_err(err)?,
            ),
            (
                NoiseSpec::All { variance },
                q_all_sensors(&net, variance).map_err(err)?.lead,
            ),
        ];
        for (noise, closed) in cases {
            let reference =
                theoretical_lead_matrix(&b, &noise.diffusion(n).map_err(err)?).map_err(err)?;
            worst = worst.max((closed.matrix() - reference.matrix()).norm());
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    Ok((
        worst < 1e-9 && within(elapsed, 5.0),
        format!(
            "{count} closed forms, max Frobenius {worst:.2e} (< 1e-9), {:.2} s (< 5 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn c3_lambda_table() -> Check {
    let start = Instant::now();
    let table = experiment(
        ExperimentKind::LambdaLimit,
        r#"{"dimensions":[20,21,22,23,24]}"#,
        None,
    )?;
    let reference = [2.32513e-5, 1.58971e-5, 1.09305e-5, 7.55596e-6, 5.24969e-6];
    let distances = real_column(&table, "distance_to_two_over_pi");
    let lambdas = real_column(&table, "lambda1");
    let worst = distances
        .iter()
        .zip(&reference)
        .map(|(d, p)| (d - p).abs())
        .fold(0.0, f64::max);
    let consistent = lambdas
        .iter()
        .zip(&distances)
        .all(|(l, d)| ((FRAC_2_PI - l) - d).abs() < 1e-15);
    let elapsed = start.elapsed();
    Ok((
        worst < 1e-7 && consistent && within(elapsed, 1.0),
        format!(
            "max deviation from reference {worst:.2e} (< 1e-7), {:.3} s (< 1 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn c4_minor_table() -> Check {
    let table = experiment(ExperimentKind::Minors, r#"{"n":10}"#, None)?;
    let reference = [
        0.634179, 0.633523, 0.632329, 0.630125, 0.626035, 0.618269, 0.601800, 0.555167, 0.347293,
        0.298889,
    ];
    let minors = real_column(&table, "lambda1_minor");
    let worst = minors
        .iter()
        .zip(&reference)
        .map(|(m, p)| (m - p).abs())
        .fold(0.0, f64::max);
    let interlacing = table.metadata["summary"]["max_interlacing_violation"]
        .as_f64()
        .unwrap_or(f64::NAN);
    Ok((
        minors.len() == 10 && worst < 1e-5 && interlacing <= 1e-10,
        format!("max deviation {worst:.2e} (< 1e-5), interlacing violation {interlacing:.2e} (<= 1e-10)"),
    ))
}

fn c5_gershgorin() -> Check {
    let table = experiment(
        ExperimentKind::Gershgorin,
        r#"{"dimensions":[4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30,31,32,33,34,35,36,37,38,39,40,41,42,43,44,45,46,47,48,49,50,51,52,53,54,55,56,57,58,59,60,61,62,63,64]}"#,
        None,
    )?;
    let ns = real_column(&table, "n");
    let js = real_column(&table, "j");
    let radii = real_column(&table, "radius");
    let mut worst: f64 = 0.0;
    let mut seen = 0;
    for ((n, j), r) in ns.iter().zip(&js).zip(&radii) {
        if *j == n - 1.0 {
            worst = worst.max((r - (1.0 - n / 2f64.powi(*n as i32))).abs());
            seen += 1;
        }
    }
    Ok((
        seen == 61 && worst < 1e-12,
        format!("{seen} dimensions, max |R - (1 - N/2^N)| {worst:.2e} (< 1e-12)"),
    ))
}

fn c6_asymptotic_orders() -> Check {
    let err = |e: cyclicity_core::Error| e.to_string();
    let residual = |eps: f64, second: bool| -> Result<f64, String> {
        let net = PropagationNetwork::new(8, 2, -1.0, eps).map_err(err)?;
        let exact = q_one_sensor(&net, 8, 1.0).map_err(err)?;
        let limit = if second {
            q_second_regime_one_sensor(&net, 8, 1.0)
        } else {
            q_first_regime_one_sensor(&net, 8, 1.0)
        }
        .map_err(err)?;
        Ok((exact.matrix() - limit.matrix()).norm())
    };
    let large = [1e2, 1e3, 1e4];
    let small = [1e-1, 1e-2, 1e-3];
    let first: Vec<f64> = large
        .iter()
        .map(|&e| residual(e, false))
        .collect::<Result<_, _>>()?;
    let second: Vec<f64> = small
        .iter()
        .map(|&e| residual(e, true))
        .collect::<Result<_, _>>()?;
    let s1 = slope(&large, &first);
    let s2 = slope(&small, &second);
    Ok((
        (s1 + 2.0).abs() <= 0.3 && (s2 - 1.0).abs() <= 0.3,
        format!("first-regime slope {s1:.3} (-2 ± 0.3), second-regime slope {s2:.3} (+1 ± 0.3)"),
    ))
}

fn c7_first_regime_vector() -> Check {
    let err = |e: cyclicity_core::Error| e.to_string();
    let mut worst: f64 = 0.0;
    let mut orientations = Vec::new();
    for (s, p) in [(8usize, 2usize), (1, 2), (3, 4), (5, 6), (7, 8)] {
        let net = PropagationNetwork::new(8, p, -1.0, 1e4).map_err(err)?;
        let v1 = leading_vector(q_one_sensor(&net, s, 1.0).map_err(err)?.matrix())?;
        let limit = v1_first_regime_limit(s, p, 8).map_err(err)?;
        let same = phase_aligned_residual(&v1, &limit);
        let conj = phase_aligned_residual(&v1.conjugate(), &limit);
        worst = worst.max(same.min(conj));
        orientations.push(if conj < same { "conjugate" } else { "same" });
    }
    Ok((
        worst < 1e-3,
        format!("max residual {worst:.2e} (< 1e-3), orientations {orientations:?}"),
    ))
}

fn c8_all_sensor_recovery() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, p) in [(100usize, 2usize), (7, 3), (9, 4)] {
        let q = match leading_mode_all_sensors(n, p) {
            Ok(q) => q,
            Err(e) => {
                ok = false;
                notes.push(format!("({n},{p}): {e}"));
                continue;
            }
        };
        let net = PropagationNetwork::new(n, p, -1.0, 1e-6).map_err(|e| e.to_string())?;
        let lead = q_all_sensors(&net, 1.0).map_err(|e| e.to_string())?.lead;
        let v1 = leading_vector(lead.matrix())?;
        let w = fourier_vector(q, n);
        let overlap = w.dotc(&v1).norm().max(w.dotc(&v1.conjugate()).norm());
        let order = cyclic_order_permutation(n, p).map_err(|e| e.to_string())?;
        let matched = cyclic_match(&phase_argsort(&v1), &order);
        let pass = overlap > 1.0 - 1e-8 && matched.is_some();
        ok &= pass;
        let orientation = matched.map_or("none", |m| m.orientation.label());
        notes.push(format!(
            "({n},{p}): q={q} overlap 1-{:.1e}, order match {orientation}",
            1.0 - overlap
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn c9_slln() -> Check {
    let start = Instant::now();
    let json = r#"{"friction":[2.1,-0.2,-0.4,-0.6,-0.8],"sigma":1.0,"iterations":[10000,1000000],"steps":[0.01],"replicates":5}"#;
    let table = experiment(ExperimentKind::SllnScatter, json, Some(1))?;
    let errors = table.metadata["summary"]["errors"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let mut by_seed: std::collections::BTreeMap<u64, [f64; 2]> = Default::default();
    for e in &errors {
        let seed = e["seed"].as_u64().unwrap_or(0);
        let slot = if e["iterations"].as_u64() == Some(1_000_000) {
            1
        } else {
            0
        };
        by_seed.entry(seed).or_insert([f64::NAN; 2])[slot] =
            e["relative_error"].as_f64().unwrap_or(f64::NAN);
    }
    let mean = by_seed.values().map(|v| v[1]).sum::<f64>() / by_seed.len().max(1) as f64;
    let decreasing = by_seed.values().all(|v| v[1] < v[0]);
    let elapsed = start.elapsed();
    Ok((
        by_seed.len() == 5 && mean < 0.15 && decreasing && within(elapsed, 120.0),
        format!(
            "mean relative error at K=1e6 {mean:.4} (< 0.15), decreasing for every seed: {decreasing}, {:.1} s (< 120 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn c10_coom() -> Check {
    let err = |e: cyclicity_core::Error| e.to_string();
    let model = PeriodicCoom::sinusoid_network(10).map_err(err)?;
    let lead = coom_lead_matrix(&model).map_err(err)?;
    let spectrum = skew_eigendecomposition(lead.matrix()).map_err(err)?;
    let ratio = spectrum.ratio().map_err(err)?;
    let lo = spectrum
        .moduli
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = spectrum.moduli.iter().cloned().fold(0.0, f64::max);
    let recovery = phase_order_recovery(&lead).map_err(err)?;
    let identity: Vec<usize> = (1..=10).collect();
    let matched = recovery.compare(&identity);
    let taus: Vec<f64> = (0..256).map(|k| k as f64 / 256.0).collect();
    let corr =
        cross_correlation(|t| (TAU * t).sin(), |t| (TAU * t).cos(), 1.0, &taus).map_err(err)?;
    let corr_err = taus
        .iter()
        .zip(&corr)
        .map(|(t, c)| (c + (TAU * t).sin() / 2.0).abs())
        .fold(0.0, f64::max);
    let h = 1.0 / 512.0;
    let times: Vec<f64> = (0..=(24 * 512)).map(|k| -12.0 + k as f64 * h).collect();
    let x: Vec<f64> = times.iter().map(|t| (-PI * t * t).exp()).collect();
    let y: Vec<f64> = times
        .iter()
        .map(|t| (-PI * (t - 1.0) * (t - 1.0)).exp())
        .collect();
    let area = oriented_area(&x, &y).map_err(err)?;
    let area_err = (area - PI * (-PI / 2.0).exp() / 2f64.sqrt()).abs();
    Ok((
        ratio == f64::INFINITY && hi - lo < 1e-10 && matched.is_some() && corr_err < 1e-8 && area_err < 1e-6,
        format!(
            "ratio {ratio}, moduli spread {:.1e} (< 1e-10), order match {}, correlation error {corr_err:.1e} (< 1e-8), area error {area_err:.1e} (< 1e-6)",
            hi - lo,
            matched.map_or("none", |m| m.orientation.label())
        ),
    ))
}

fn c11_regime_sweep() -> Check {
    let json = r#"{"n":100,"p":2,"b_p":-1.0,"noise":{"kind":"one-sensor","sensor":100,"variance":1.0},"epsilons":[1e-11,1e-10,1e-1,1.0,1e3,1e4]}"#;
    let table = experiment(ExperimentKind::RegimeSweep, json, None)?;
    let sources = text_column(&table, "source");
    let eps = real_column(&table, "epsilon");
    let ratios = real_column(&table, "ratio");
    let moduli = real_column(&table, "modulus");
    let mut per_eps: Vec<(f64, f64)> = Vec::new();
    let mut smallest: Vec<f64> = Vec::new();
    for i in 0..sources.len() {
        if sources[i] != "theoretical" {
            continue;
        }
        if per_eps.last().map(|l| l.0) != Some(eps[i]) {
            per_eps.push((eps[i], ratios[i]));
        }
        if eps[i] == 1e-11 {
            smallest.push(moduli[i]);
        }
    }
    let increasing = per_eps.windows(2).all(|w| w[1].1 > w[0].1);
    let reference = [
        (1e-10, 2.00022),
        (1e-1, 8.00132),
        (1.0, 201.8365),
        (1e3, 1.606e13),
    ];
    let magnitude = reference.iter().all(|(e, r)| {
        per_eps
            .iter()
            .any(|(pe, pr)| pe == e && (pr / r).log10().abs() < 1.0)
    });
    let n = smallest.len();
    let argmax = (0..n).fold(0, |b, i| if smallest[i] > smallest[b] { i } else { b }) + 1;
    let trailing: f64 = smallest[n.saturating_sub(10)..].iter().map(|m| m * m).sum();
    let dominate = n == 100 && argmax > 90 && trailing > 0.5;
    let shown: Vec<String> = per_eps
        .iter()
        .map(|(e, r)| format!("{e:e}:{r:.6e}"))
        .collect();
    Ok((
        per_eps.len() == 6 && increasing && magnitude && dominate,
        format!(
            "ratios [{}] increasing {increasing}, reference magnitudes {magnitude}; at 1e-11 argmax component {argmax}, trailing-10 mass {trailing:.3} (> 0.5)",
            shown.join(", ")
        ),
    ))
}

fn c12_conjectures() -> Check {
    let table = experiment(
        ExperimentKind::ConjectureReport,
        r#"{"dimensions":[2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30,31,32,33,34,35,36,37,38,39,40,41,42,43,44,45,46,47,48,49,50,51,52,53,54,55,56,57,58,59,60,61,62,63,64]}"#,
        None,
    )?;
    let checks = text_column(&table, "check");
    let status = text_column(&table, "status");
    let required = [
        "lambda1_nondecreasing",
        "lambda1_at_most_one",
        "moduli_increasing",
        "interlacing",
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for name in required {
        let rows = checks.iter().filter(|c| *c == name).count();
        let violated = checks
            .iter()
            .zip(&status)
            .filter(|(c, s)| *c == name && *s == "violated")
            .count();
        ok &= rows > 0 && violated == 0;
        parts.push(format!("{name} {violated}/{rows}"));
    }
    Ok((ok, format!("violations: {}", parts.join(", "))))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "Lyapunov vs quadrature", c1_lyapunov_vs_quadrature),
        (2, "closed-form equivalence web", c2_equivalence_web),
        (3, "binomial eigenvalue table", c3_lambda_table),
        (4, "principal minors of A_10", c4_minor_table),
        (5, "Gershgorin identity", c5_gershgorin),
        (6, "asymptotic orders", c6_asymptotic_orders),
        (7, "first-regime eigenvector limit", c7_first_regime_vector),
        (8, "all-sensors recovery", c8_all_sensor_recovery),
        (9, "strong law", c9_slln),
        (10, "COOM recovery", c10_coom),
        (11, "regime sweep", c11_regime_sweep),
        (12, "conjecture report", c12_conjectures),
    ];
    let mut unexpected = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let label = if pass { "PASS" } else { "FAIL" };
        println!(
            "{label} [{id:>2}] {name}: {detail} ({:.2} s)",
            start.elapsed().as_secs_f64()
        );
        if !pass {
            match UNATTAINABLE.iter().find(|(u, _)| *u == id) {
                Some((_, reason)) => println!("       unattainable as stated: {reason}"),
                None => unexpected += 1,
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criterion/criteria failed");
        std::process::exit(1);
    }
}
