mod args;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{
    BenchArgs, CiArgs, Cli, Command, EstimateArgs, Experiment, GenArgs, OracleArgs, SampleArgs,
};
use mixest_core::estimator::{
    confidence_interval, estimate_absolute, estimate_kappa_gen, estimate_relative,
    mixing_time_from_kappa, ContractionEstimate, TimeEstimate,
};
use mixest_core::harness::{
    generate_chain, run_coverage, run_error_curve, run_visit_concentration, write_coverage_csv,
    write_error_curve_csv, write_visits_csv, ChainSpec, ExperimentConfig, Truth,
};
use mixest_core::oracle::summarize;
use mixest_core::sampler::TrajectorySampler;
use mixest_core::{Error, MarkovKernel, RandomSeed, Trajectory};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_argument_error() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn read_kernel(path: &Path) -> CliResult<MarkovKernel> {
    Ok(MarkovKernel::from_json_str(&read_text(path)?)?)
}

fn read_trajectory(path: &Path) -> CliResult<Trajectory> {
    Ok(read_text(path)?.parse()?)
}

/// Pretty JSON with a trailing newline, to a file or stdout.
fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    match out {
        Some(path) => write_bytes(path, text.as_bytes()),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn gen(a: GenArgs) -> CliResult<()> {
    let spec = ChainSpec::new(a.family, a.d, a.params, a.seed);
    let kernel = generate_chain(&spec)?;
    let mut text = kernel.to_json_string();
    text.push('\n');
    write_bytes(&a.out, text.as_bytes())
}

fn sample(a: SampleArgs) -> CliResult<()> {
    let kernel = read_kernel(&a.kernel)?;
    let initial = a.mu.resolve(&kernel)?;
    let traj =
        TrajectorySampler::new(&kernel).sample(&initial, a.m, &mut RandomSeed(a.seed).rng())?;
    write_bytes(&a.out, traj.to_string().as_bytes())
}

fn oracle(a: OracleArgs) -> CliResult<()> {
    let kernel = read_kernel(&a.kernel)?;
    emit_json(&summarize(&kernel, a.xi)?, a.out.as_deref())
}

#[derive(Serialize)]
struct EstimateOutput {
    #[serde(flatten)]
    estimate: ContractionEstimate,
    /// `null` when no scanned skip contracts.
    t_hat: Option<TimeEstimate>,
}

fn estimate(a: EstimateArgs) -> CliResult<()> {
    let traj = read_trajectory(&a.traj)?;
    let estimate = match (a.scan_bound, a.eps) {
        (Some(s), _) => estimate_kappa_gen(&traj, s, a.lambda)?,
        (None, Some(eps)) => estimate_absolute(&traj, eps, a.lambda)?,
        (None, None) => estimate_relative(&traj, a.lambda)?,
    };
    let t_hat = mixing_time_from_kappa(estimate.kappa_hat);
    emit_json(&EstimateOutput { estimate, t_hat }, a.out.as_deref())
}

fn ci(a: CiArgs) -> CliResult<()> {
    let traj = read_trajectory(&a.traj)?;
    let ci = confidence_interval(&traj, a.scan_bound, a.delta, a.lambda)?;
    emit_json(&ci, a.out.as_deref())
}

#[derive(Serialize)]
struct CoverageSummary {
    truth: Truth,
    replicates: usize,
    coverage_rate: f64,
    median_abs_error: f64,
    bracket_hit_rate: f64,
}

fn bench(a: BenchArgs) -> CliResult<()> {
    let config: ExperimentConfig =
        serde_json::from_str(&read_text(&a.config)?).map_err(|source| CliError::Json {
            path: a.config.clone(),
            source,
        })?;
    let mut csv = Vec::new();
    match a.experiment {
        Experiment::Coverage => {
            let report = run_coverage(&config)?;
            write_coverage_csv(&report, &mut csv)?;
            emit_json(
                &CoverageSummary {
                    truth: report.truth,
                    replicates: report.records.len(),
                    coverage_rate: report.coverage_rate,
                    median_abs_error: report.median_abs_error,
                    bracket_hit_rate: report.bracket_hit_rate,
                },
                None,
            )?;
        }
        Experiment::ErrorCurve => {
            let grid = if config.m_grid.is_empty() {
                vec![config.m]
            } else {
                config.m_grid.clone()
            };
            let report = run_error_curve(&config, &grid)?;
            write_error_curve_csv(&report, &mut csv)?;
            emit_json(&report, None)?;
        }
        Experiment::Visits => {
            let report = run_visit_concentration(&config, &config.s_list)?;
            write_visits_csv(&report, &mut csv)?;
            emit_json(&report, None)?;
        }
    }
    write_bytes(&a.out, &csv)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Sample(a) => sample(a),
        Command::Oracle(a) => oracle(a),
        Command::Estimate(a) => estimate(a),
        Command::Ci(a) => ci(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
