//! Data-driven confidence intervals around the generalized contraction
//! coefficient.
//!
//! With probability at least `1 − δ`,
//!
//! ```text
//! |κ̂ − κ̃| ≤ 1/S + max_{r ≤ S} (4/r) · L_r · √(d / N_min^(r))
//! ```
//!
//! where `L_r` is the smallest `t ≥ 1` with
//! `(1 + ⌈ln(2m/(t·r))⌉₊) · (d + 1) · e^{−t} ≤ δ/(d·S)`.

use serde::Serialize;

use super::{check_scan_bound, scan_skips};
use crate::error::{Error, Result};
use crate::sampler::Trajectory;

/// Largest double strictly below 1. The interval `[a, UPPER_LIMIT]` holds
/// exactly the same doubles as `[a, 1)`.
pub const UPPER_LIMIT: f64 = 1.0 - f64::EPSILON / 2.0;

const BISECTION_TOL: f64 = 1e-9;

fn log_factor_bound(m: f64, r: f64, d: f64, t: f64) -> f64 {
    let log_term = (2.0 * m / (t * r)).ln().ceil().max(0.0);
    (1.0 + log_term) * (d + 1.0) * (-t).exp()
}

/// `L_r`, found by bisection to within `1e-9` and never below 1.
///
/// The returned value always satisfies the defining inequality: bisection
/// keeps the upper end of the bracket on the feasible side.
pub fn solve_log_factor(
    m: usize,
    r: usize,
    d: usize,
    scan_bound: usize,
    delta: f64,
) -> Result<f64> {
    if m < 2 || r == 0 || d == 0 || scan_bound == 0 {
        return Err(Error::invalid(
            "log factor needs m >= 2 and positive r, d, S",
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let (m, r, df) = (m as f64, r as f64, d as f64);
    let target = delta / (df * scan_bound as f64);
    let feasible = |t: f64| log_factor_bound(m, r, df, t) <= target;
    if feasible(1.0) {
        return Ok(1.0);
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while !feasible(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One skip's contribution `(4/s) · L_s · √(d / N_min^(s))` to the width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFactorTerm {
    pub s: usize,
    pub log_factor: f64,
    pub n_min: u64,
    /// Infinite (`null` in JSON) when `n_min` is zero.
    pub term: f64,
}

impl LogFactorTerm {
    pub fn new(s: usize, log_factor: f64, n_min: u64, d: usize) -> Self {
        let term = if n_min == 0 {
            f64::INFINITY
        } else {
            4.0 / s as f64 * log_factor * (d as f64 / n_min as f64).sqrt()
        };
        LogFactorTerm {
            s,
            log_factor,
            n_min,
            term,
        }
    }
}

/// `1/S + max_s term_s`.
pub fn interval_width(scan_bound: usize, terms: &[LogFactorTerm]) -> f64 {
    1.0 / scan_bound as f64 + terms.iter().map(|t| t.term).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    /// `κ̂` at scan bound `S`.
    pub center: f64,
    pub width: f64,
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
    #[serde(rename = "S")]
    pub scan_bound: usize,
    /// Some skip had an unvisited state; the interval is the vacuous `[0, 1)`.
    pub degenerate: bool,
    pub per_s_terms: Vec<LogFactorTerm>,
}

impl ConfidenceInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

pub fn confidence_interval(
    traj: &Trajectory,
    scan_bound: usize,
    delta: f64,
    lambda: f64,
) -> Result<ConfidenceInterval> {
    check_scan_bound(traj, scan_bound)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let (estimate, n_mins) = scan_skips(traj, scan_bound, lambda)?;
    let (m, d) = (traj.len(), traj.num_states());
    let per_s_terms = n_mins
        .iter()
        .enumerate()
        .map(|(idx, &n_min)| {
            let s = idx + 1;
            Ok(LogFactorTerm::new(
                s,
                solve_log_factor(m, s, d, scan_bound, delta)?,
                n_min,
                d,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let width = interval_width(scan_bound, &per_s_terms);
    let center = estimate.kappa_hat;
    let degenerate = n_mins.contains(&0);
    let (lower, upper) = if degenerate {
        (0.0, UPPER_LIMIT)
    } else {
        let upper = (center + width).min(UPPER_LIMIT);
        ((center - width).max(0.0).min(upper), upper)
    };
    Ok(ConfidenceInterval {
        center,
        width,
        lower,
        upper,
        delta,
        scan_bound,
        degenerate,
        per_s_terms,
    })
}
