//! Seeded trajectory simulation, `s`-skipped sub-trajectories, and the plain
//! text trajectory format.
//!
//! Randomness comes from ChaCha8, a counter-based generator with 2^64
//! independent streams per key. A [`RandomSeed`] is the key; replicate `r` of
//! an experiment reads stream `r`, so replicates can run on any thread in any
//! order and still reproduce bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{MarkovKernel, StateDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// Generator on the default stream.
    pub fn rng(self) -> ChaCha8Rng {
        self.substream(0)
    }

    /// Generator on stream `index`, independent of every other stream under
    /// the same seed.
    pub fn substream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

/// An observed state sequence `X_1..X_m`, stored 0-based (`X_t` is
/// `states[t - 1]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<usize>,
    d: usize,
}

impl Trajectory {
    pub fn new(states: Vec<usize>, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!(
                "state space needs at least 2 states, got {d}"
            )));
        }
        if states.len() < 2 {
            return Err(Error::invalid(format!(
                "trajectory needs at least 2 observations, got {}",
                states.len()
            )));
        }
        if let Some((t, x)) = states.iter().enumerate().find(|(_, &x)| x >= d) {
            return Err(Error::invalid(format!(
                "observation {t} is state {x}, outside 0..{d}"
            )));
        }
        Ok(Trajectory { states, d })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false; trajectories hold at least two states.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.d
    }
}

/// Header line `d=<int> m=<int>`, then the states on one line.
impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d={} m={}", self.d, self.states.len())?;
        let mut first = true;
        for x in &self.states {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        writeln!(f)
    }
}

impl FromStr for Trajectory {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty trajectory file".into()))?;
        let mut d = None;
        let mut m = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header field {field:?}")))?;
            let value: usize = value
                .parse()
                .map_err(|_| Error::Parse(format!("header value {value:?} is not an integer")))?;
            match key {
                "d" => d = Some(value),
                "m" => m = Some(value),
                other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
            }
        }
        let (d, m) = match (d, m) {
            (Some(d), Some(m)) => (d, m),
            _ => return Err(Error::Parse("header must be `d=<int> m=<int>`".into())),
        };
        let states = lines
            .flat_map(str::split_whitespace)
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("state {tok:?} is not a non-negative integer"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if states.len() != m {
            return Err(Error::Parse(format!(
                "header declares m = {m} but {} states follow",
                states.len()
            )));
        }
        Trajectory::new(states, d)
    }
}

/// Inverse-CDF sampler with the cumulative sums of every row precomputed.
#[derive(Debug, Clone)]
pub struct TrajectorySampler {
    d: usize,
    cdf: Vec<f64>,
    fallback: Vec<usize>,
}

fn cumulative(probs: &[f64]) -> (Vec<f64>, usize) {
    let mut acc = 0.0;
    let cdf = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    // Rounding can leave the last cumulative sum a hair under 1.
    let fallback = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (cdf, fallback)
}

fn invert(cdf: &[f64], fallback: usize, u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(fallback)
}

impl TrajectorySampler {
    pub fn new(kernel: &MarkovKernel) -> Self {
        let d = kernel.dim();
        let mut cdf = Vec::with_capacity(d * d);
        let mut fallback = Vec::with_capacity(d);
        for row in kernel.rows() {
            let (c, f) = cumulative(row);
            cdf.extend(c);
            fallback.push(f);
        }
        TrajectorySampler { d, cdf, fallback }
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        initial: &StateDistribution,
        m: usize,
        rng: &mut R,
    ) -> Result<Trajectory> {
        if initial.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: initial.dim(),
            });
        }
        if m < 2 {
            return Err(Error::invalid(format!(
                "trajectory length must be at least 2, got {m}"
            )));
        }
        let (init_cdf, init_fallback) = cumulative(initial.probs());
        let mut states = Vec::with_capacity(m);
        let mut x = invert(&init_cdf, init_fallback, rng.random());
        states.push(x);
        for _ in 1..m {
            let row = &self.cdf[x * self.d..(x + 1) * self.d];
            x = invert(row, self.fallback[x], rng.random());
            states.push(x);
        }
        Ok(Trajectory { states, d: self.d })
    }
}

/// Draws `X_1 ~ μ`, `X_{t+1} ~ M(X_t, ·)` on the default stream of `seed`.
pub fn sample_trajectory(
    kernel: &MarkovKernel,
    initial: &StateDistribution,
    m: usize,
    seed: RandomSeed,
) -> Result<Trajectory> {
    TrajectorySampler::new(kernel).sample(initial, m, &mut seed.rng())
}

/// The sub-trajectory `X_1, X_{1+s}, …, X_{1+⌊(m−1)/s⌋s}`.
pub fn skip_subsample(traj: &Trajectory, s: usize) -> Result<Trajectory> {
    let m = traj.len();
    if s == 0 || s > m - 1 {
        return Err(Error::invalid(format!(
            "skip rate must lie in 1..={}, got {s}",
            m - 1
        )));
    }
    let states = traj.states.iter().copied().step_by(s).collect();
    Trajectory::new(states, traj.d)
}
