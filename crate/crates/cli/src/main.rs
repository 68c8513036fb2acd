//! `cyclicity <experiment> --config <path> [--out <path>] [--seed <u64>]`

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cyclicity_cli::{
    parse_thread_cap, run_experiment, CliError, ExperimentConfig, ExperimentKind, THREADS_VAR,
};

#[derive(Debug, Parser)]
#[command(name = "cyclicity", version, about = "Lead-lag cyclicity experiments")]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: ExperimentKind,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; defaults to the configured output or `<experiment>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: Args) -> Result<PathBuf, CliError> {
    let cap = parse_thread_cap(std::env::var(THREADS_VAR).ok().as_deref())?;
    if let Some(threads) = cap {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    }
    let config = ExperimentConfig::load(&args.config)?;
    let table = run_experiment(args.experiment, &config, args.seed)?;
    let out = args
        .out
        .or_else(|| config.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", args.experiment.name())));
    table.write_atomic(&out)?;
    Ok(out)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(out) => {
            eprintln!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
