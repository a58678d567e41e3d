use serde::Serialize;

use crate::chain::{dobrushin_coefficient, MarkovKernel};
use crate::error::{Error, Result};
use crate::sampler::Trajectory;

/// Visit and transition counts of the `s`-skipped chain.
///
/// Only the first `⌊(m−1)/s⌋` skipped positions count as visits; the final
/// skipped state has no outgoing transition and is left out, so every visit
/// is matched by exactly one transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipCounts {
    s: usize,
    d: usize,
    visits: Vec<u64>,
    transitions: Vec<u64>,
    n_min: u64,
    num_steps: u64,
}

impl SkipCounts {
    pub fn skip(&self) -> usize {
        self.s
    }

    pub fn num_states(&self) -> usize {
        self.d
    }

    /// `N_i`
    pub fn visits(&self) -> &[u64] {
        &self.visits
    }

    /// `N_ij`
    pub fn transitions(&self, i: usize, j: usize) -> u64 {
        self.transitions[i * self.d + j]
    }

    pub fn transition_row(&self, i: usize) -> &[u64] {
        &self.transitions[i * self.d..(i + 1) * self.d]
    }

    /// Least number of visits to any state.
    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    /// `⌊(m−1)/s⌋`
    pub fn num_steps(&self) -> u64 {
        self.num_steps
    }
}

#[cfg(test)]
impl SkipCounts {
    /// Skip-1 counts with the given visits and no transitions recorded.
    pub(crate) fn from_visits(visits: Vec<u64>) -> Self {
        let d = visits.len();
        SkipCounts {
            s: 1,
            d,
            n_min: visits.iter().copied().min().unwrap_or(0),
            num_steps: visits.iter().sum(),
            visits,
            transitions: vec![0; d * d],
        }
    }
}

pub fn accumulate_counts(traj: &Trajectory, s: usize) -> Result<SkipCounts> {
    let m = traj.len();
    if s == 0 || s > m - 1 {
        return Err(Error::invalid(format!(
            "skip rate must lie in 1..={}, got {s}",
            m - 1
        )));
    }
    let d = traj.num_states();
    let states = traj.states();
    let num_steps = (m - 1) / s;
    let mut visits = vec![0u64; d];
    let mut transitions = vec![0u64; d * d];
    for t in 0..num_steps {
        let from = states[s * t];
        let to = states[s * (t + 1)];
        visits[from] += 1;
        transitions[from * d + to] += 1;
    }
    let n_min = visits.iter().copied().min().unwrap_or(0);
    Ok(SkipCounts {
        s,
        d,
        visits,
        transitions,
        n_min,
        num_steps: num_steps as u64,
    })
}

/// Empirical `s`-step kernel, optionally additively smoothed.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalKernel {
    pub kernel: MarkovKernel,
    pub lambda: f64,
    /// `N_i > 0` per state. Unvisited rows of an unsmoothed kernel are
    /// uniform.
    pub visited: Vec<bool>,
}

/// Row `i` is `(N_ij + λ)/(N_i + dλ)`. With `λ = 0` an unvisited row has no
/// data at all and is filled with the uniform distribution.
pub fn empirical_kernel(counts: &SkipCounts, lambda: f64) -> Result<EmpiricalKernel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "smoothing parameter must be finite and >= 0, got {lambda}"
        )));
    }
    let d = counts.d;
    let dl = d as f64;
    let mut data = Vec::with_capacity(d * d);
    for i in 0..d {
        let n_i = counts.visits[i] as f64;
        let row = counts.transition_row(i);
        if lambda == 0.0 && counts.visits[i] == 0 {
            data.extend(std::iter::repeat_n(1.0 / dl, d));
        } else {
            let denom = n_i + dl * lambda;
            data.extend(row.iter().map(|&n_ij| (n_ij as f64 + lambda) / denom));
        }
    }
    Ok(EmpiricalKernel {
        kernel: MarkovKernel::from_row_major_unchecked(d, data),
        lambda,
        visited: counts.visits.iter().map(|&n| n > 0).collect(),
    })
}

/// `κ̂_s`: the Dobrushin coefficient of the empirical kernel.
pub fn empirical_dobrushin(ek: &EmpiricalKernel) -> f64 {
    dobrushin_coefficient(&ek.kernel)
}
