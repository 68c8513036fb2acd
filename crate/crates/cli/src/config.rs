//! JSON experiment configuration.
//!
//! Every field is optional; each experiment reads the fields it needs, fills
//! in defaults for the rest and rejects fields that do not apply to it.

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// The experiments the binary can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Distance of the largest binomial-matrix eigenvalue from `2/π`.
    LambdaLimit,
    /// Largest eigenvalues of the principal minors of a binomial matrix.
    Minors,
    /// Gershgorin radii of binomial matrices.
    Gershgorin,
    /// Time-averaged empirical lead matrix entries against the theoretical ones.
    SllnScatter,
    /// Leading eigenvector structure of a cyclic network across perturbations.
    RegimeSweep,
    /// Lead matrix and order recovery for the sinusoid network.
    CoomDemo,
    /// Numerical observations on the binomial-matrix conjectures.
    ConjectureReport,
}

impl ExperimentKind {
    /// Kebab-case name as typed on the command line.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LambdaLimit => "lambda-limit",
            ExperimentKind::Minors => "minors",
            ExperimentKind::Gershgorin => "gershgorin",
            ExperimentKind::SllnScatter => "slln-scatter",
            ExperimentKind::RegimeSweep => "regime-sweep",
            ExperimentKind::CoomDemo => "coom-demo",
            ExperimentKind::ConjectureReport => "conjecture-report",
        }
    }
}

/// Which sensors receive noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseConfig {
    /// Noise in sensor `sensor` only.
    OneSensor {
        sensor: usize,
        #[serde(default = "unit")]
        variance: f64,
    },
    /// Noise in the last `count` sensors.
    Trailing {
        count: usize,
        #[serde(default = "unit")]
        variance: f64,
    },
    /// Noise in every sensor.
    All {
        #[serde(default = "unit")]
        variance: f64,
    },
}

fn unit() -> f64 {
    1.0
}

/// Optional Euler–Maruyama column of the regime sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalConfig {
    /// Sample count `K`.
    pub iterations: usize,
    /// Time step `Δ`.
    pub step: f64,
}

/// Parsed configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment name; must agree with the command line when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    /// Single dimension `N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// List of dimensions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<Vec<usize>>,
    /// Index of the nonzero propagation coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Value of the propagation coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_p: Option<f64>,
    /// Perturbations to sweep, used exactly as listed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    /// Noise placement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    /// First row of a circulant friction matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub friction: Option<Vec<f64>>,
    /// Volatility `Σ = σ I`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Sample counts `K`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<Vec<usize>>,
    /// Time steps `Δ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<f64>>,
    /// Base seed; replicate `r` uses `seed + r`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of independent realisations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    /// Euler–Maruyama settings for the regime sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalConfig>,
    /// Samples per period for sampled signals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// `(N, L)` pairs for the multi-sensor observations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multi_sensor: Option<Vec<(usize, usize)>>,
    /// Output path; the command line takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    /// Parses a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads and parses a JSON file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Names of the fields that are set.
    pub fn present_fields(&self) -> Vec<&'static str> {
        let flags = [
            ("experiment", self.experiment.is_some()),
            ("n", self.n.is_some()),
            ("dimensions", self.dimensions.is_some()),
            ("p", self.p.is_some()),
            ("b_p", self.b_p.is_some()),
            ("epsilons", self.epsilons.is_some()),
            ("noise", self.noise.is_some()),
            ("friction", self.friction.is_some()),
            ("sigma", self.sigma.is_some()),
            ("iterations", self.iterations.is_some()),
            ("steps", self.steps.is_some()),
            ("seed", self.seed.is_some()),
            ("replicates", self.replicates.is_some()),
            ("empirical", self.empirical.is_some()),
            ("samples", self.samples.is_some()),
            ("multi_sensor", self.multi_sensor.is_some()),
            ("output", self.output.is_some()),
        ];
        flags
            .into_iter()
            .filter(|(_, set)| *set)
            .map(|(name, _)| name)
            .collect()
    }

    /// Rejects fields outside `allowed`; `experiment`, `seed` and `output` are
    /// accepted everywhere.
    pub fn require_only(&self, kind: ExperimentKind, allowed: &[&str]) -> Result<()> {
        for field in self.present_fields() {
            if !allowed.contains(&field) && !["experiment", "seed", "output"].contains(&field) {
                return Err(CliError::Config(format!(
                    "field `{field}` does not apply to {}",
                    kind.name()
                )));
            }
        }
        if let Some(named) = self.experiment {
            if named != kind {
                return Err(CliError::Config(format!(
                    "config names experiment {} but {} was requested",
                    named.name(),
                    kind.name()
                )));
            }
        }
        Ok(())
    }
}
