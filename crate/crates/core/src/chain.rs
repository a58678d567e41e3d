//! Finite Markov kernels, distributions over their state space, and the exact
//! metric primitives built on them: total variation, kernel powers, stationary
//! distributions, primitivity, and the Dobrushin contraction coefficient.
//!
//! All types are immutable once constructed and validate their invariants at
//! construction time; invalid input is rejected rather than silently repaired.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on row sums and distribution sums.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Power iteration stops once successive iterates are this close in total
/// variation.
const STATIONARY_TV_TOL: f64 = 1e-13;
const STATIONARY_MAX_ITERS: u64 = 1_000_000;

/// A probability vector over `d >= 2` states.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StateDistribution {
    probs: Vec<f64>,
}

impl StateDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::invalid(format!(
                "a distribution needs at least 2 states, got {}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::invalid(format!("probability {i} is {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::invalid(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(StateDistribution { probs })
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    pub fn point_mass(d: usize, state: usize) -> Result<Self> {
        if state >= d {
            return Err(Error::invalid(format!(
                "point mass at state {state} outside 0..{d}"
            )));
        }
        let mut probs = vec![0.0; d];
        probs[state] = 1.0;
        Self::new(probs)
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Smallest entry; for a stationary distribution this is `π_min`.
    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// One step of the chain: the row vector `μM`.
    pub fn step(&self, kernel: &MarkovKernel) -> Result<StateDistribution> {
        check_dims(kernel.dim(), self.dim())?;
        let mut out = vec![0.0; kernel.dim()];
        left_multiply(&self.probs, kernel, &mut out);
        normalize(&mut out);
        Ok(StateDistribution { probs: out })
    }
}

/// Row-stochastic `d x d` transition matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelFile", into = "KernelFile")]
pub struct MarkovKernel {
    d: usize,
    data: Vec<f64>,
}

/// On-disk shape of a kernel: `{"d": <int>, "rows": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct KernelFile {
    d: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<KernelFile> for MarkovKernel {
    type Error = Error;

    fn try_from(file: KernelFile) -> Result<Self> {
        if file.rows.len() != file.d {
            return Err(Error::Parse(format!(
                "declared d = {} but found {} rows",
                file.d,
                file.rows.len()
            )));
        }
        MarkovKernel::new(file.rows)
    }
}

impl From<MarkovKernel> for KernelFile {
    fn from(k: MarkovKernel) -> Self {
        KernelFile {
            d: k.d,
            rows: k.to_rows(),
        }
    }
}

impl MarkovKernel {
    /// Builds a kernel from its rows, rejecting anything that is not square,
    /// has entries outside `[0, 1]`, or has a row sum off by more than
    /// [`STOCHASTIC_TOL`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::invalid(format!(
                "row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
        Self::from_row_major(d, rows.into_iter().flatten().collect())
    }

    pub fn from_row_major(d: usize, data: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!(
                "a kernel needs at least 2 states, got {d}"
            )));
        }
        if data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: data.len(),
            });
        }
        for (i, row) in data.chunks_exact(d).enumerate() {
            if let Some((j, p)) = row
                .iter()
                .enumerate()
                .find(|(_, p)| !p.is_finite() || **p < 0.0 || **p > 1.0)
            {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) = {p} not in [0, 1]"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::invalid(format!("row {i} sums to {total}, not 1")));
            }
        }
        Ok(MarkovKernel { d, data })
    }

    /// Caller guarantees every row is a probability vector up to rounding.
    pub(crate) fn from_row_major_unchecked(d: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), d * d);
        for row in data.chunks_exact_mut(d) {
            normalize(row);
        }
        MarkovKernel { d, data }
    }

    /// Kernel whose rows are all equal to `row`.
    pub fn rank_one(row: &StateDistribution) -> Self {
        let d = row.dim();
        let data = (0..d).flat_map(|_| row.probs().iter().copied()).collect();
        MarkovKernel { d, data }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// The product `self · other`, rows renormalized if rounding pushed a row
    /// sum more than [`STOCHASTIC_TOL`] away from 1.
    pub fn compose(&self, other: &MarkovKernel) -> Result<MarkovKernel> {
        check_dims(self.d, other.d)?;
        let d = self.d;
        let mut data = vec![0.0; d * d];
        for (row_in, row_out) in self.rows().zip(data.chunks_exact_mut(d)) {
            left_multiply(row_in, other, row_out);
        }
        Ok(Self::from_row_major_unchecked(d, data))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("kernel serialization is infallible")
    }
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `out = v · M`.
fn left_multiply(v: &[f64], kernel: &MarkovKernel, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (&w, row) in v.iter().zip(kernel.rows()) {
        if w == 0.0 {
            continue;
        }
        for (o, &p) in out.iter_mut().zip(row) {
            *o += w * p;
        }
    }
}

/// Rescales to unit sum when drift exceeds [`STOCHASTIC_TOL`]; clamps rounding
/// overshoot above 1.
fn normalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOL && total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    }
    v.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
}

/// Half the l1 distance between two equal-length slices.
pub(crate) fn half_l1(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Total variation distance `½‖p − q‖₁`.
pub fn total_variation(p: &StateDistribution, q: &StateDistribution) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(half_l1(p.probs(), q.probs()))
}

/// `M^s` for `s >= 1`, by binary exponentiation. `M^1` is `M` itself.
pub fn kernel_power(kernel: &MarkovKernel, s: u64) -> Result<MarkovKernel> {
    if s == 0 {
        return Err(Error::invalid("kernel power must be at least 1"));
    }
    let mut result: Option<MarkovKernel> = None;
    let mut base = kernel.clone();
    let mut exp = s;
    loop {
        if exp & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(acc) => acc.compose(&base)?,
            });
        }
        exp >>= 1;
        if exp == 0 {
            break;
        }
        base = base.compose(&base)?;
    }
    Ok(result.expect("s >= 1 sets at least one bit"))
}

/// Stationary distribution by power iteration from the uniform start.
///
/// Fails with [`Error::NonConvergence`] when successive iterates have not
/// settled after a million steps, which is what periodic or otherwise
/// non-ergodic kernels do.
pub fn stationary_distribution(kernel: &MarkovKernel) -> Result<StateDistribution> {
    let d = kernel.dim();
    let mut current = vec![1.0 / d as f64; d];
    let mut next = vec![0.0; d];
    for _ in 0..STATIONARY_MAX_ITERS {
        left_multiply(&current, kernel, &mut next);
        normalize(&mut next);
        let moved = half_l1(&current, &next);
        std::mem::swap(&mut current, &mut next);
        if moved < STATIONARY_TV_TOL {
            let total: f64 = current.iter().sum();
            current.iter_mut().for_each(|x| *x /= total);
            return StateDistribution::new(current);
        }
    }
    Err(Error::NonConvergence {
        what: "stationary distribution power iteration",
        limit: STATIONARY_MAX_ITERS,
    })
}

/// Upper bound `(d−1)² + 1` on the exponent at which a primitive `d x d`
/// matrix becomes entrywise positive.
pub fn wielandt_index(d: usize) -> u64 {
    let d = d as u64;
    (d - 1) * (d - 1) + 1
}

/// Whether the kernel is primitive, decided on its boolean support so that
/// tiny entries cannot underflow.
pub fn is_ergodic(kernel: &MarkovKernel) -> bool {
    let d = kernel.dim();
    let support: Vec<bool> = kernel.data.iter().map(|&p| p > 0.0).collect();
    let mut power = support.clone();
    for _ in 0..wielandt_index(d) {
        if power.iter().all(|&b| b) {
            return true;
        }
        let mut next = vec![false; d * d];
        for i in 0..d {
            for k in (0..d).filter(|&k| power[i * d + k]) {
                for j in 0..d {
                    next[i * d + j] |= support[k * d + j];
                }
            }
        }
        power = next;
    }
    false
}

/// Dobrushin contraction coefficient: the largest total variation distance
/// between two rows.
pub fn dobrushin_coefficient(kernel: &MarkovKernel) -> f64 {
    let d = kernel.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max(half_l1(kernel.row(i), kernel.row(j)));
        }
    }
    worst
}

/// `max_{i,j} π(i)/π(j)`, i.e. `max π / min π`.
pub fn beta_ratio(pi: &StateDistribution) -> Result<f64> {
    let min = pi.min_prob();
    if min <= 0.0 {
        return Err(Error::invalid(
            "beta ratio needs strictly positive probabilities",
        ));
    }
    let max = pi.probs().iter().copied().fold(0.0, f64::max);
    Ok(max / min)
}

/// Induced l∞ operator norm of the difference: the largest row-wise l1
/// distance.
pub fn sup_norm_distance(a: &MarkovKernel, b: &MarkovKernel) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.rows()
        .zip(b.rows())
        .map(|(r, s)| 2.0 * half_l1(r, s))
        .fold(0.0, f64::max))
}
