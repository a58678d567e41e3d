//! Exact, brute-force population quantities for a known kernel: distance to
//! stationarity, mixing times, the skipped contraction coefficients `κ_s`, and
//! the generalized contraction coefficient `κ̃ = 1 − max_s (1 − κ_s)/s`.
//!
//! These are ground truth for tests and Monte Carlo experiments; none of them
//! look at data.

use serde::Serialize;

use crate::chain::{
    beta_ratio, dobrushin_coefficient, half_l1, kernel_power, stationary_distribution,
    wielandt_index, MarkovKernel, StateDistribution,
};
use crate::error::{Error, Result};

/// Conventional mixing threshold, `t_mix = t_mix(1/4)`.
pub const DEFAULT_XI: f64 = 0.25;

const MIXING_TIME_CAP: u64 = 10_000_000;
const CONTRACTION_SCAN_CAP: u64 = 1_000_000;

/// Contraction of the `s`-step chain together with its rate `(1 − κ_s)/s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkipContraction {
    pub s: u64,
    pub kappa: f64,
    pub rate: f64,
}

impl SkipContraction {
    pub fn new(s: u64, kappa: f64) -> Self {
        SkipContraction {
            s,
            kappa,
            rate: (1.0 - kappa) / s as f64,
        }
    }
}

/// First entry with the largest rate; ties go to the smaller `s`.
pub(crate) fn best_rate(per_s: &[SkipContraction]) -> Option<&SkipContraction> {
    per_s.iter().fold(None, |best, c| match best {
        Some(b) if b.rate >= c.rate => Some(b),
        _ => Some(c),
    })
}

/// Exact generalized contraction coefficient of a known kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactContraction {
    /// `κ̃`
    pub kappa_gen: f64,
    /// Smallest skip attaining the maximum rate.
    pub k_gen: u64,
    /// Last skip examined by the scan.
    pub scanned_up_to: u64,
    pub per_s: Vec<SkipContraction>,
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi < 0.5) {
        return Err(Error::invalid(format!("xi must lie in (0, 1/2), got {xi}")));
    }
    Ok(())
}

/// Worst point-mass distance `max_i TV(P(i,·), π)`; by convexity this is the
/// supremum over all initial distributions.
fn worst_row_distance(power: &MarkovKernel, pi: &StateDistribution) -> f64 {
    power
        .rows()
        .map(|row| half_l1(row, pi.probs()))
        .fold(0.0, f64::max)
}

/// `h(t)`: worst-case total variation distance to stationarity after `t`
/// steps.
pub fn distance_to_stationarity(kernel: &MarkovKernel, t: u64) -> Result<f64> {
    let pi = stationary_distribution(kernel)?;
    let power = kernel_power(kernel, t)?;
    Ok(worst_row_distance(&power, &pi))
}

/// Smallest `t >= 1` with `h(t) < ξ` (strict).
pub fn exact_mixing_time(kernel: &MarkovKernel, xi: f64) -> Result<u64> {
    check_xi(xi)?;
    let pi = stationary_distribution(kernel)?;
    mixing_time_against(kernel, &pi, xi)
}

fn mixing_time_against(kernel: &MarkovKernel, pi: &StateDistribution, xi: f64) -> Result<u64> {
    let mut power = kernel.clone();
    for t in 1..=MIXING_TIME_CAP {
        if worst_row_distance(&power, pi) < xi {
            return Ok(t);
        }
        power = power.compose(kernel)?;
    }
    Err(Error::NonConvergence {
        what: "mixing time scan",
        limit: MIXING_TIME_CAP,
    })
}

/// `κ_s = κ(M^s)`.
pub fn exact_kappa_s(kernel: &MarkovKernel, s: u64) -> Result<f64> {
    Ok(dobrushin_coefficient(&kernel_power(kernel, s)?))
}

/// Scans `s = 1, 2, …` keeping the best rate `v = max (1 − κ_s)/s`, and stops
/// once `s >= max(W, ⌈1/v⌉)` with `v > 0`, `W` the Wielandt index: since
/// `(1 − κ_s)/s < 1/s`, no later skip can beat `v`.
pub fn exact_generalized_contraction(kernel: &MarkovKernel) -> Result<ExactContraction> {
    let floor = wielandt_index(kernel.dim());
    let mut per_s = Vec::new();
    let mut power = kernel.clone();
    let mut best = 0.0_f64;
    for s in 1..=CONTRACTION_SCAN_CAP {
        if s > 1 {
            power = power.compose(kernel)?;
        }
        let entry = SkipContraction::new(s, dobrushin_coefficient(&power));
        best = best.max(entry.rate);
        per_s.push(entry);
        if best > 0.0 && s >= floor.max((1.0 / best).ceil() as u64) {
            let top = *best_rate(&per_s).expect("non-empty scan");
            return Ok(ExactContraction {
                kappa_gen: 1.0 - top.rate,
                k_gen: top.s,
                scanned_up_to: s,
                per_s,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "generalized contraction scan",
        limit: CONTRACTION_SCAN_CAP,
    })
}

/// Two-sided bracket on the mixing time in terms of `κ̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds {
    pub lower: f64,
    pub upper: f64,
    pub tmix: u64,
    pub kappa_gen: f64,
    pub holds: bool,
}

/// `(1 − 2ξ)/(1 − κ̃) ≤ t_mix(ξ) ≤ (1 + ln(1/ξ))/(1 − κ̃)`, both sides and
/// the middle computed exactly.
pub fn sandwich_bounds(kernel: &MarkovKernel, xi: f64) -> Result<SandwichBounds> {
    check_xi(xi)?;
    let gen = exact_generalized_contraction(kernel)?;
    let tmix = exact_mixing_time(kernel, xi)?;
    Ok(bracket(gen.kappa_gen, xi, tmix))
}

fn bracket(kappa_gen: f64, xi: f64, tmix: u64) -> SandwichBounds {
    let gap = 1.0 - kappa_gen;
    let lower = (1.0 - 2.0 * xi) / gap;
    let upper = (1.0 + (1.0 / xi).ln()) / gap;
    let t = tmix as f64;
    SandwichBounds {
        lower,
        upper,
        tmix,
        kappa_gen,
        holds: lower <= t && t <= upper,
    }
}

/// Mixing time of the `s`-skipped chain, i.e. of `M^s`.
pub fn skipped_mixing_time(kernel: &MarkovKernel, s: u64, xi: f64) -> Result<u64> {
    exact_mixing_time(&kernel_power(kernel, s)?, xi)
}

/// Everything the `oracle` command reports for a kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub kappa_gen: f64,
    pub k_gen: u64,
    pub tmix: u64,
    pub pimin: f64,
    pub beta: f64,
    pub bracket_lower: f64,
    pub bracket_upper: f64,
}

pub fn summarize(kernel: &MarkovKernel, xi: f64) -> Result<OracleSummary> {
    check_xi(xi)?;
    let pi = stationary_distribution(kernel)?;
    let gen = exact_generalized_contraction(kernel)?;
    let tmix = mixing_time_against(kernel, &pi, xi)?;
    let b = bracket(gen.kappa_gen, xi, tmix);
    Ok(OracleSummary {
        kappa_gen: gen.kappa_gen,
        k_gen: gen.k_gen,
        tmix,
        pimin: pi.min_prob(),
        beta: beta_ratio(&pi)?,
        bracket_lower: b.lower,
        bracket_upper: b.upper,
    })
}
