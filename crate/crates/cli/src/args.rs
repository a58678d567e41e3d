use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixest_core::harness::{ChainFamily, InitialLaw};

#[derive(Debug, Parser)]
#[command(
    name = "mixest",
    version,
    about = "Single-trajectory mixing time estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a kernel from one of the synthetic families.
    Gen(GenArgs),
    /// Simulate a trajectory from a kernel.
    Sample(SampleArgs),
    /// Exact contraction and mixing quantities of a kernel.
    Oracle(OracleArgs),
    /// Estimate the generalized contraction coefficient from a trajectory.
    Estimate(EstimateArgs),
    /// Confidence interval for the generalized contraction coefficient.
    Ci(CiArgs),
    /// Run a Monte Carlo experiment and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: ChainFamily,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Family parameters, space- or comma-separated.
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub params: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial law: uniform, stationary or point:<i>.
    #[arg(long, default_value = "stationary", value_parser = parse_initial)]
    pub mu: InitialLaw,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long, default_value_t = mixest_core::oracle::DEFAULT_XI)]
    pub xi: f64,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("scan").required(true).args(["scan_bound", "eps", "adaptive"]))]
pub struct EstimateArgs {
    #[arg(long)]
    pub traj: PathBuf,
    /// Fixed scan bound.
    #[arg(long = "S")]
    pub scan_bound: Option<usize>,
    /// Target absolute error; scans up to ceil(2/eps).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Choose the scan bound from the visit counts.
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[arg(long)]
    pub traj: PathBuf,
    #[arg(long = "S")]
    pub scan_bound: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Experiment {
    Coverage,
    ErrorCurve,
    Visits,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_family(s: &str) -> Result<ChainFamily, String> {
    s.parse().map_err(|e: mixest_core::Error| e.to_string())
}

fn parse_initial(s: &str) -> Result<InitialLaw, String> {
    s.parse().map_err(|e: mixest_core::Error| e.to_string())
}
