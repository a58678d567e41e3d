//! Single-trajectory estimation of the generalized contraction coefficient
//! and of the mixing time.
//!
//! For each skip `s` in `1..=S` the trajectory is read as the `s`-step chain
//! `X_1, X_{1+s}, …`; its empirical kernel gives `κ̂_s`, and
//! `κ̂ = 1 − max_s (1 − κ̂_s)/s`. The scan bound `S` is either fixed, derived
//! from a target absolute error (`⌈2/ε⌉`), or chosen from the data
//! (`⌈√(N_min/d)⌉`).

mod counts;
mod interval;

pub use counts::{
    accumulate_counts, empirical_dobrushin, empirical_kernel, EmpiricalKernel, SkipCounts,
};
pub use interval::{
    confidence_interval, interval_width, solve_log_factor, ConfidenceInterval, LogFactorTerm,
    UPPER_LIMIT,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{best_rate, SkipContraction};
use crate::sampler::Trajectory;

/// Estimated generalized contraction coefficient over skips `1..=S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionEstimate {
    pub kappa_hat: f64,
    pub per_s: Vec<SkipContraction>,
    /// Smallest skip attaining the maximum rate.
    pub arg_s: u64,
    #[serde(rename = "S")]
    pub scan_bound: usize,
}

pub(crate) fn check_scan_bound(traj: &Trajectory, scan_bound: usize) -> Result<()> {
    let limit = traj.len() - 1;
    if scan_bound == 0 || scan_bound > limit {
        return Err(Error::invalid(format!(
            "scan bound S must lie in 1..={limit} for m = {}, got {scan_bound}",
            traj.len()
        )));
    }
    Ok(())
}

/// The estimate together with `N_min^(s)` for every scanned skip.
pub(crate) fn scan_skips(
    traj: &Trajectory,
    scan_bound: usize,
    lambda: f64,
) -> Result<(ContractionEstimate, Vec<u64>)> {
    check_scan_bound(traj, scan_bound)?;
    let mut per_s = Vec::with_capacity(scan_bound);
    let mut n_mins = Vec::with_capacity(scan_bound);
    for s in 1..=scan_bound {
        let counts = accumulate_counts(traj, s)?;
        let ek = empirical_kernel(&counts, lambda)?;
        per_s.push(SkipContraction::new(s as u64, empirical_dobrushin(&ek)));
        n_mins.push(counts.n_min());
    }
    let top = *best_rate(&per_s).expect("scan bound is at least 1");
    let estimate = ContractionEstimate {
        kappa_hat: (1.0 - top.rate).clamp(0.0, 1.0),
        per_s,
        arg_s: top.s,
        scan_bound,
    };
    Ok((estimate, n_mins))
}

/// `κ̂` with the scan bound `S` supplied by the caller.
pub fn estimate_kappa_gen(
    traj: &Trajectory,
    scan_bound: usize,
    lambda: f64,
) -> Result<ContractionEstimate> {
    scan_skips(traj, scan_bound, lambda).map(|(estimate, _)| estimate)
}

/// `⌈2/ε⌉`, the scan bound for a target absolute error `ε`.
pub fn absolute_scan_bound(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok((2.0 / eps).ceil() as usize)
}

/// Estimator for absolute error `ε`: scans the first `⌈2/ε⌉` skips. Needs
/// nothing about the chain beyond its state count.
pub fn estimate_absolute(traj: &Trajectory, eps: f64, lambda: f64) -> Result<ContractionEstimate> {
    let scan_bound = absolute_scan_bound(eps)?;
    if scan_bound > traj.len() - 1 {
        return Err(Error::invalid(format!(
            "eps = {eps} scans {scan_bound} skips and needs m >= {}, got m = {}",
            scan_bound + 1,
            traj.len()
        )));
    }
    estimate_kappa_gen(traj, scan_bound, lambda)
}

/// Data-driven scan bound `max(1, ⌈√(N_min/d)⌉)` from the one-step counts.
#[allow(non_snake_case)]
pub fn adaptive_S(counts_s1: &SkipCounts, d: usize) -> usize {
    debug_assert_eq!(counts_s1.skip(), 1);
    // Smallest k with k² · d >= N_min, in exact integer arithmetic.
    let n_min = counts_s1.n_min();
    let d = d.max(1) as u64;
    let mut k = ((n_min as f64 / d as f64).sqrt().ceil() as u64).saturating_sub(1);
    while k * k * d < n_min {
        k += 1;
    }
    k.max(1) as usize
}

/// Estimator for relative error: the scan bound grows with the least visited
/// state's count, capped at `m − 1`.
pub fn estimate_relative(traj: &Trajectory, lambda: f64) -> Result<ContractionEstimate> {
    let counts = accumulate_counts(traj, 1)?;
    let scan_bound = adaptive_S(&counts, traj.num_states()).min(traj.len() - 1);
    estimate_kappa_gen(traj, scan_bound, lambda)
}

/// `t̂ = 1/(1 − κ̂)` and its ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeEstimate {
    pub real: f64,
    pub int: u64,
}

/// `None` when `κ̂ = 1`: no scanned skip showed any contraction, so the data
/// cannot bound the mixing time.
pub fn mixing_time_from_kappa(kappa_hat: f64) -> Option<TimeEstimate> {
    if kappa_hat >= 1.0 {
        return None;
    }
    let real = 1.0 / (1.0 - kappa_hat);
    Some(TimeEstimate {
        real,
        int: real.ceil() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingTimeEstimate {
    pub contraction: ContractionEstimate,
    /// `None` flags insufficient data.
    pub t_hat: Option<TimeEstimate>,
}

/// Mixing time estimate from the relative-error (adaptive) estimator.
pub fn estimate_mixing_time(traj: &Trajectory, lambda: f64) -> Result<MixingTimeEstimate> {
    let contraction = estimate_relative(traj, lambda)?;
    let t_hat = mixing_time_from_kappa(contraction.kappa_hat);
    Ok(MixingTimeEstimate { contraction, t_hat })
}

/// Occupancy-frequency estimate of `π_min`: `N_min / ⌊m−1⌋` at skip 1.
pub fn pimin_plugin(counts_s1: &SkipCounts) -> f64 {
    counts_s1.n_min() as f64 / counts_s1.num_steps() as f64
}

/// Practical scan bound `max(n, ⌈√(m · min(π_lb, 1/d) / d)⌉)`.
#[allow(non_snake_case)]
pub fn heuristic_S(m: usize, d: usize, pimin_lb: f64, n: usize) -> Result<usize> {
    if !(pimin_lb > 0.0 && pimin_lb <= 1.0) {
        return Err(Error::invalid(format!(
            "pi_min lower bound must lie in (0, 1], got {pimin_lb}"
        )));
    }
    if d == 0 || n == 0 {
        return Err(Error::invalid(
            "heuristic scan bound needs d >= 1 and n >= 1",
        ));
    }
    let d = d as f64;
    let balanced = (m as f64 * pimin_lb.min(1.0 / d) / d).sqrt().ceil() as usize;
    Ok(balanced.max(n))
}

/// Default lower clamp `n` for [`heuristic_S`].
pub const HEURISTIC_MIN_S: usize = 3;
