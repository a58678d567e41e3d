use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_chain, ChainSpec};
use super::stats::{quantile, Quartiles};
use crate::chain::{stationary_distribution, MarkovKernel, StateDistribution};
use crate::error::{Error, Result};
use crate::estimator::{
    absolute_scan_bound, accumulate_counts, adaptive_S, confidence_interval, estimate_kappa_gen,
    heuristic_S, mixing_time_from_kappa, pimin_plugin, HEURISTIC_MIN_S,
};
use crate::oracle::{exact_generalized_contraction, exact_mixing_time};
use crate::sampler::{RandomSeed, Trajectory, TrajectorySampler};

/// How the scan bound `S` is chosen for each replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Fixed(usize),
    /// `max(n, ⌈√(m · min(π̂_min, 1/d) / d)⌉)` with the occupancy plug-in for
    /// `π_min`.
    Heuristic,
    /// `⌈√(N_min/d)⌉`.
    Adaptive,
    /// `⌈2/ε⌉`.
    Absolute,
}

/// Initial law of simulated trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialLaw {
    #[default]
    Stationary,
    Uniform,
    Point(usize),
}

impl InitialLaw {
    pub fn resolve(self, kernel: &MarkovKernel) -> Result<StateDistribution> {
        match self {
            InitialLaw::Stationary => stationary_distribution(kernel),
            InitialLaw::Uniform => StateDistribution::uniform(kernel.dim()),
            InitialLaw::Point(i) => StateDistribution::point_mass(kernel.dim(), i),
        }
    }
}

impl FromStr for InitialLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(InitialLaw::Stationary),
            "uniform" => Ok(InitialLaw::Uniform),
            _ => s
                .strip_prefix("point:")
                .and_then(|i| i.parse().ok())
                .map(InitialLaw::Point)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "initial law must be uniform, stationary or point:<i>, got {s:?}"
                    ))
                }),
        }
    }
}

impl fmt::Display for InitialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialLaw::Stationary => f.write_str("stationary"),
            InitialLaw::Uniform => f.write_str("uniform"),
            InitialLaw::Point(i) => write!(f, "point:{i}"),
        }
    }
}

fn default_delta() -> f64 {
    0.1
}
fn default_eps() -> f64 {
    0.1
}
fn default_xi() -> f64 {
    crate::oracle::DEFAULT_XI
}
fn default_scan_mode() -> ScanMode {
    ScanMode::Adaptive
}
fn default_heuristic_n() -> usize {
    HEURISTIC_MIN_S
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(alias = "chain")]
    pub spec: ChainSpec,
    pub m: usize,
    pub replicates: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_xi")]
    pub xi: f64,
    #[serde(rename = "S_mode", alias = "s_mode", default = "default_scan_mode")]
    pub s_mode: ScanMode,
    #[serde(default)]
    pub master_seed: RandomSeed,
    #[serde(default)]
    pub initial: InitialLaw,
    /// Lower clamp `n` of the heuristic scan bound.
    #[serde(default = "default_heuristic_n")]
    pub heuristic_n: usize,
    /// Trajectory lengths for the error curve.
    #[serde(default)]
    pub m_grid: Vec<usize>,
    /// Skip rates for the visit-concentration experiment.
    #[serde(default)]
    pub s_list: Vec<usize>,
}

impl ExperimentConfig {
    pub fn new(spec: ChainSpec, m: usize, replicates: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            spec,
            m,
            replicates,
            delta: default_delta(),
            eps: default_eps(),
            lambda: 0.0,
            xi: default_xi(),
            s_mode: default_scan_mode(),
            master_seed: RandomSeed(master_seed),
            initial: InitialLaw::Stationary,
            heuristic_n: default_heuristic_n(),
            m_grid: Vec::new(),
            s_list: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.m < 2 {
            return Err(Error::invalid(format!(
                "m must be at least 2, got {}",
                self.m
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        absolute_scan_bound(self.eps)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.xi > 0.0 && self.xi < 0.5) {
            return Err(Error::invalid(format!(
                "xi must lie in (0, 1/2), got {}",
                self.xi
            )));
        }
        if self.heuristic_n == 0 {
            return Err(Error::invalid("heuristic_n must be at least 1"));
        }
        if let ScanMode::Fixed(0) = self.s_mode {
            return Err(Error::invalid("fixed scan bound must be at least 1"));
        }
        Ok(())
    }

    fn scan_bound_for(&self, traj: &Trajectory) -> Result<usize> {
        let limit = traj.len() - 1;
        let wanted = match self.s_mode {
            ScanMode::Fixed(s) => s,
            ScanMode::Absolute => absolute_scan_bound(self.eps)?,
            ScanMode::Adaptive => {
                let counts = accumulate_counts(traj, 1)?;
                adaptive_S(&counts, traj.num_states()).min(limit)
            }
            ScanMode::Heuristic => {
                let counts = accumulate_counts(traj, 1)?;
                // An unvisited state makes the plug-in zero; fall back to the
                // smallest frequency the trajectory can resolve.
                let lb = pimin_plugin(&counts).max(1.0 / counts.num_steps() as f64);
                heuristic_S(traj.len(), traj.num_states(), lb, self.heuristic_n)?.min(limit)
            }
        };
        if wanted > limit {
            return Err(Error::invalid(format!(
                "scan bound {wanted} needs m >= {}, got m = {}",
                wanted + 1,
                traj.len()
            )));
        }
        Ok(wanted)
    }
}

/// Oracle quantities the replicates are scored against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truth {
    pub kappa_gen: f64,
    pub k_gen: u64,
    pub tmix: u64,
    pub pimin: f64,
}

impl Truth {
    pub fn of(kernel: &MarkovKernel, xi: f64) -> Result<Self> {
        let gen = exact_generalized_contraction(kernel)?;
        Ok(Truth {
            kappa_gen: gen.kappa_gen,
            k_gen: gen.k_gen,
            tmix: exact_mixing_time(kernel, xi)?,
            pimin: stationary_distribution(kernel)?.min_prob(),
        })
    }

    /// `t_mix/3 <= t <= 3 t_mix`.
    pub fn in_bracket(&self, t_hat: f64) -> bool {
        let t = self.tmix as f64;
        t / 3.0 <= t_hat && t_hat <= 3.0 * t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub kappa_hat: f64,
    pub scan_bound: usize,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub ci_width: f64,
    pub degenerate: bool,
    pub covered: bool,
    pub t_hat: Option<f64>,
    pub t_hat_int: Option<u64>,
    pub bracket_hit: bool,
    pub abs_error: f64,
    pub n_min_per_s: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub truth: Truth,
    pub records: Vec<ReplicateRecord>,
    pub coverage_rate: f64,
    pub median_abs_error: f64,
    pub bracket_hit_rate: f64,
}

impl CoverageReport {
    pub fn from_records(truth: Truth, records: Vec<ReplicateRecord>) -> Self {
        let n = records.len() as f64;
        let covered = records.iter().filter(|r| r.covered).count() as f64;
        let hits = records.iter().filter(|r| r.bracket_hit).count() as f64;
        let errors: Vec<f64> = records.iter().map(|r| r.abs_error).collect();
        CoverageReport {
            truth,
            coverage_rate: covered / n,
            median_abs_error: quantile(&errors, 0.5),
            bracket_hit_rate: hits / n,
            records,
        }
    }
}

/// Shared per-experiment state: the kernel, its sampler and initial law, and
/// the oracle truth.
struct Setup {
    sampler: TrajectorySampler,
    initial: StateDistribution,
    truth: Truth,
}

impl Setup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let kernel = generate_chain(&config.spec)?;
        Ok(Setup {
            sampler: TrajectorySampler::new(&kernel),
            initial: config.initial.resolve(&kernel)?,
            truth: Truth::of(&kernel, config.xi)?,
        })
    }

    fn trajectory(&self, config: &ExperimentConfig, m: usize, stream: u64) -> Result<Trajectory> {
        self.sampler
            .sample(&self.initial, m, &mut config.master_seed.substream(stream))
    }
}

/// Samples `replicates` trajectories, each on its own sub-stream of the
/// master seed, and scores the estimate, interval, and mixing-time estimate
/// of each against the oracle.
pub fn run_coverage(config: &ExperimentConfig) -> Result<CoverageReport> {
    let setup = Setup::new(config)?;
    let records = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let traj = setup.trajectory(config, config.m, r as u64)?;
            let scan_bound = config.scan_bound_for(&traj)?;
            let ci = confidence_interval(&traj, scan_bound, config.delta, config.lambda)?;
            let t_hat = mixing_time_from_kappa(ci.center);
            Ok(ReplicateRecord {
                replicate: r,
                kappa_hat: ci.center,
                scan_bound,
                ci_lower: ci.lower,
                ci_upper: ci.upper,
                ci_width: ci.width,
                degenerate: ci.degenerate,
                covered: ci.contains(setup.truth.kappa_gen),
                t_hat: t_hat.map(|t| t.real),
                t_hat_int: t_hat.map(|t| t.int),
                bracket_hit: t_hat.is_some_and(|t| setup.truth.in_bracket(t.real)),
                abs_error: (ci.center - setup.truth.kappa_gen).abs(),
                n_min_per_s: ci.per_s_terms.iter().map(|t| t.n_min).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport::from_records(setup.truth, records))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorCurveRow {
    pub m: usize,
    pub replicates: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurveReport {
    pub truth: Truth,
    pub rows: Vec<ErrorCurveRow>,
}

/// Sub-stream for replicate `r` at grid point `g`; distinct for every pair.
fn grid_stream(g: usize, r: usize) -> u64 {
    ((g as u64) << 32) | r as u64
}

/// Absolute error `|κ̂ − κ̃|` summarized per trajectory length.
pub fn run_error_curve(config: &ExperimentConfig, m_grid: &[usize]) -> Result<ErrorCurveReport> {
    if m_grid.is_empty() {
        return Err(Error::invalid(
            "error curve needs at least one trajectory length",
        ));
    }
    if let Some(&m) = m_grid.iter().find(|&&m| m < 2) {
        return Err(Error::invalid(format!(
            "grid lengths must be at least 2, got {m}"
        )));
    }
    let setup = Setup::new(config)?;
    let rows = m_grid
        .iter()
        .enumerate()
        .map(|(g, &m)| {
            let errors = (0..config.replicates)
                .into_par_iter()
                .map(|r| {
                    let traj = setup.trajectory(config, m, grid_stream(g, r))?;
                    let scan_bound = config.scan_bound_for(&traj)?;
                    let est = estimate_kappa_gen(&traj, scan_bound, config.lambda)?;
                    Ok((est.kappa_hat - setup.truth.kappa_gen).abs())
                })
                .collect::<Result<Vec<_>>>()?;
            let Quartiles { q1, median, q3 } = Quartiles::of(&errors);
            Ok(ErrorCurveRow {
                m,
                replicates: config.replicates,
                median,
                q1,
                q3,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurveReport {
        truth: setup.truth,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisitRow {
    pub s: usize,
    pub replicates: usize,
    /// `½ · ⌊(m−1)/s⌋ · π_min`
    pub threshold: f64,
    pub bad_events: usize,
    pub bad_event_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisitReport {
    pub m: usize,
    pub pimin: f64,
    pub rows: Vec<VisitRow>,
}

/// Frequency of the low-visit event `N_min^(s) < ½ · ⌊(m−1)/s⌋ · π_min` for
/// stationary-start trajectories.
pub fn run_visit_concentration(config: &ExperimentConfig, s_list: &[usize]) -> Result<VisitReport> {
    if config.initial != InitialLaw::Stationary {
        return Err(Error::invalid(
            "visit concentration is defined for stationary-start trajectories only",
        ));
    }
    if s_list.is_empty() {
        return Err(Error::invalid(
            "visit concentration needs at least one skip rate",
        ));
    }
    if let Some(&s) = s_list
        .iter()
        .find(|&&s| s == 0 || s > config.m.saturating_sub(1))
    {
        return Err(Error::invalid(format!(
            "skip rate {s} outside 1..={}",
            config.m.saturating_sub(1)
        )));
    }
    let setup = Setup::new(config)?;
    let pimin = setup.truth.pimin;
    let thresholds: Vec<f64> = s_list
        .iter()
        .map(|&s| 0.5 * ((config.m - 1) / s) as f64 * pimin)
        .collect();
    let bad: Vec<Vec<bool>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let traj = setup.trajectory(config, config.m, r as u64)?;
            s_list
                .iter()
                .zip(&thresholds)
                .map(|(&s, &threshold)| {
                    Ok((accumulate_counts(&traj, s)?.n_min() as f64) < threshold)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows = s_list
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let bad_events = bad.iter().filter(|flags| flags[k]).count();
            VisitRow {
                s,
                replicates: config.replicates,
                threshold: thresholds[k],
                bad_events,
                bad_event_rate: bad_events as f64 / config.replicates as f64,
            }
        })
        .collect();
    Ok(VisitReport {
        m: config.m,
        pimin,
        rows,
    })
}
