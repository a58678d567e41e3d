use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::chain::{is_ergodic, MarkovKernel, StateDistribution};
use crate::error::{Error, Result};
use crate::sampler::RandomSeed;

const MAX_GENERATION_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainFamily {
    /// Rows drawn from a symmetric Dirichlet(α); `params = [α]`, default 1.
    RandomDirichlet,
    /// Hold with probability `h`, else step to `i + 1 mod d`; `params = [h]`,
    /// default 0.5.
    LazyCycle,
    /// Hold with probability `h`, else step forward with probability `p` and
    /// backward otherwise; `params = [p, h]`, default `[0.75, 0.1]`.
    BiasedCycle,
    /// The fixed kernel `[[0,1,0],[0,0,1],[½,½,0]]`, whose one-step
    /// contraction coefficient is 1.
    ThreeStateFunnel,
    /// Every row equal to `params` (uniform when empty).
    RankOne,
    /// `[[1−p, p], [q, 1−q]]`; `params = [p, q]`.
    TwoState,
}

impl ChainFamily {
    pub const ALL: [ChainFamily; 6] = [
        ChainFamily::RandomDirichlet,
        ChainFamily::LazyCycle,
        ChainFamily::BiasedCycle,
        ChainFamily::ThreeStateFunnel,
        ChainFamily::RankOne,
        ChainFamily::TwoState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChainFamily::RandomDirichlet => "random-dirichlet",
            ChainFamily::LazyCycle => "lazy-cycle",
            ChainFamily::BiasedCycle => "biased-cycle",
            ChainFamily::ThreeStateFunnel => "three-state-funnel",
            ChainFamily::RankOne => "rank-one",
            ChainFamily::TwoState => "two-state",
        }
    }
}

impl fmt::Display for ChainFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChainFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown chain family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub family: ChainFamily,
    pub d: usize,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub seed: RandomSeed,
}

impl ChainSpec {
    pub fn new(family: ChainFamily, d: usize, params: Vec<f64>, seed: u64) -> Self {
        ChainSpec {
            family,
            d,
            params,
            seed: RandomSeed(seed),
        }
    }

    pub fn two_state(p: f64, q: f64) -> Self {
        Self::new(ChainFamily::TwoState, 2, vec![p, q], 0)
    }

    pub fn three_state_funnel() -> Self {
        Self::new(ChainFamily::ThreeStateFunnel, 3, Vec::new(), 0)
    }
}

fn param(spec: &ChainSpec, idx: usize, default: f64) -> f64 {
    spec.params.get(idx).copied().unwrap_or(default)
}

fn expect_params(spec: &ChainSpec, max: usize) -> Result<()> {
    if spec.params.len() > max {
        return Err(Error::invalid(format!(
            "{} takes at most {max} parameters, got {}",
            spec.family,
            spec.params.len()
        )));
    }
    Ok(())
}

fn expect_dim(spec: &ChainSpec, d: usize) -> Result<()> {
    if spec.d != d {
        return Err(Error::invalid(format!(
            "{} is defined for d = {d} only, got d = {}",
            spec.family, spec.d
        )));
    }
    Ok(())
}

fn in_open_unit(name: &str, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!(
            "{name} must lie in (0, 1), got {x}"
        )));
    }
    Ok(x)
}

fn ergodic_or_fail(spec: &ChainSpec, kernel: MarkovKernel) -> Result<MarkovKernel> {
    if is_ergodic(&kernel) {
        Ok(kernel)
    } else {
        Err(Error::Generation(format!(
            "{} with params {:?} is not ergodic",
            spec.family, spec.params
        )))
    }
}

fn cycle(d: usize, hold: f64, forward: f64) -> Result<MarkovKernel> {
    let move_prob = 1.0 - hold;
    let mut rows = vec![vec![0.0; d]; d];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] += hold;
        row[(i + 1) % d] += move_prob * forward;
        row[(i + d - 1) % d] += move_prob * (1.0 - forward);
    }
    MarkovKernel::new(rows)
}

fn dirichlet_kernel<R: Rng>(d: usize, gamma: &Gamma<f64>, rng: &mut R) -> Option<MarkovKernel> {
    let mut data = Vec::with_capacity(d * d);
    for _ in 0..d {
        let row: Vec<f64> = (0..d).map(|_| gamma.sample(rng)).collect();
        let total: f64 = row.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return None;
        }
        data.extend(row.into_iter().map(|x| x / total));
    }
    Some(MarkovKernel::from_row_major_unchecked(d, data))
}

/// Builds the kernel described by `spec`. Only the Dirichlet family consumes
/// randomness; it redraws up to 100 times until the kernel is ergodic.
pub fn generate_chain(spec: &ChainSpec) -> Result<MarkovKernel> {
    if spec.d < 2 {
        return Err(Error::invalid(format!(
            "d must be at least 2, got {}",
            spec.d
        )));
    }
    let d = spec.d;
    match spec.family {
        ChainFamily::RandomDirichlet => {
            expect_params(spec, 1)?;
            let alpha = param(spec, 0, 1.0);
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::invalid(format!(
                    "alpha must be positive, got {alpha}"
                )));
            }
            let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::invalid(e.to_string()))?;
            let mut rng = spec.seed.rng();
            for _ in 0..MAX_GENERATION_ATTEMPTS {
                if let Some(k) = dirichlet_kernel(d, &gamma, &mut rng) {
                    if is_ergodic(&k) {
                        return Ok(k);
                    }
                }
            }
            Err(Error::Generation(format!(
                "no ergodic Dirichlet({alpha}) kernel after {MAX_GENERATION_ATTEMPTS} attempts"
            )))
        }
        ChainFamily::LazyCycle => {
            expect_params(spec, 1)?;
            let hold = in_open_unit("holding probability", param(spec, 0, 0.5))?;
            ergodic_or_fail(spec, cycle(d, hold, 1.0)?)
        }
        ChainFamily::BiasedCycle => {
            expect_params(spec, 2)?;
            let forward = in_open_unit("forward probability", param(spec, 0, 0.75))?;
            let hold = in_open_unit("holding probability", param(spec, 1, 0.1))?;
            ergodic_or_fail(spec, cycle(d, hold, forward)?)
        }
        ChainFamily::ThreeStateFunnel => {
            expect_dim(spec, 3)?;
            expect_params(spec, 0)?;
            MarkovKernel::new(vec![
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.5, 0.5, 0.0],
            ])
        }
        ChainFamily::RankOne => {
            let row = if spec.params.is_empty() {
                StateDistribution::uniform(d)?
            } else if spec.params.len() == d {
                StateDistribution::new(spec.params.clone())?
            } else {
                return Err(Error::invalid(format!(
                    "rank-one row has {} entries, expected {d}",
                    spec.params.len()
                )));
            };
            ergodic_or_fail(spec, MarkovKernel::rank_one(&row))
        }
        ChainFamily::TwoState => {
            expect_dim(spec, 2)?;
            if spec.params.len() != 2 {
                return Err(Error::invalid(
                    "two-state takes exactly two parameters p, q",
                ));
            }
            let (p, q) = (spec.params[0], spec.params[1]);
            let kernel = MarkovKernel::new(vec![vec![1.0 - p, p], vec![q, 1.0 - q]])?;
            ergodic_or_fail(spec, kernel)
        }
    }
}

/// Standard test corpus: the two worked chains, degenerate rank-one chains,
/// slow lazy cycles, non-reversible biased cycles, and generic Dirichlet
/// chains, over `d` from 2 to 8.
pub fn standard_corpus() -> Vec<ChainSpec> {
    let mut corpus = vec![
        ChainSpec::two_state(0.25, 0.25),
        ChainSpec::two_state(0.1, 0.3),
        ChainSpec::three_state_funnel(),
        ChainSpec::new(ChainFamily::RankOne, 3, Vec::new(), 0),
        ChainSpec::new(ChainFamily::RankOne, 4, vec![0.1, 0.2, 0.3, 0.4], 0),
    ];
    for d in 2..=8 {
        corpus.push(ChainSpec::new(ChainFamily::LazyCycle, d, vec![0.5], 0));
        corpus.push(ChainSpec::new(
            ChainFamily::RandomDirichlet,
            d,
            vec![1.0],
            1000 + d as u64,
        ));
    }
    for d in 3..=8 {
        corpus.push(ChainSpec::new(
            ChainFamily::BiasedCycle,
            d,
            vec![0.75, 0.1],
            0,
        ));
    }
    for d in [3, 5, 7] {
        corpus.push(ChainSpec::new(
            ChainFamily::RandomDirichlet,
            d,
            vec![0.3],
            2000 + d as u64,
        ));
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::dobrushin_coefficient;
    use crate::oracle::{exact_generalized_contraction, exact_mixing_time};

    #[test]
    fn two_state_construction() {
        let k = generate_chain(&ChainSpec::two_state(0.25, 0.25)).unwrap();
        assert_eq!(k.to_rows(), vec![vec![0.75, 0.25], vec![0.25, 0.75]]);
    }

    #[test]
    fn funnel_construction() {
        let k = generate_chain(&ChainSpec::three_state_funnel()).unwrap();
        assert_eq!(dobrushin_coefficient(&k), 1.0);
        assert_eq!(exact_generalized_contraction(&k).unwrap().kappa_gen, 0.8125);
    }

    #[test]
    fn rank_one_construction() {
        let spec = ChainSpec::new(ChainFamily::RankOne, 3, vec![0.2, 0.3, 0.5], 0);
        let k = generate_chain(&spec).unwrap();
        assert_eq!(exact_generalized_contraction(&k).unwrap().kappa_gen, 0.0);
        assert_eq!(exact_mixing_time(&k, 0.25).unwrap(), 1);
    }

    #[test]
    fn dirichlet_is_seeded() {
        let spec = ChainSpec::new(ChainFamily::RandomDirichlet, 5, vec![], 17);
        assert_eq!(
            generate_chain(&spec).unwrap(),
            generate_chain(&spec).unwrap()
        );
        let other = ChainSpec {
            seed: RandomSeed(18),
            ..spec.clone()
        };
        assert_ne!(
            generate_chain(&spec).unwrap(),
            generate_chain(&other).unwrap()
        );
    }

    #[test]
    fn non_ergodic_parameters_fail_generation() {
        let flip = ChainSpec::two_state(1.0, 1.0);
        assert!(matches!(generate_chain(&flip), Err(Error::Generation(_))));
        let absorbing = ChainSpec::two_state(0.0, 0.5);
        assert!(matches!(
            generate_chain(&absorbing),
            Err(Error::Generation(_))
        ));
        let spiky = ChainSpec::new(ChainFamily::RankOne, 3, vec![0.0, 0.5, 0.5], 0);
        assert!(matches!(generate_chain(&spiky), Err(Error::Generation(_))));
    }

    #[test]
    fn bad_parameters_are_argument_errors() {
        for spec in [
            ChainSpec::new(ChainFamily::ThreeStateFunnel, 4, vec![], 0),
            ChainSpec::new(ChainFamily::TwoState, 2, vec![0.5], 0),
            ChainSpec::new(ChainFamily::LazyCycle, 4, vec![1.0], 0),
            ChainSpec::new(ChainFamily::RandomDirichlet, 4, vec![-1.0], 0),
            ChainSpec::new(ChainFamily::RankOne, 3, vec![0.5, 0.5], 0),
            ChainSpec::new(ChainFamily::LazyCycle, 1, vec![], 0),
        ] {
            let err = generate_chain(&spec).unwrap_err();
            assert!(err.is_argument_error(), "{spec:?}: {err}");
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in ChainFamily::ALL {
            assert_eq!(f.name().parse::<ChainFamily>().unwrap(), f);
            assert_eq!(
                serde_json::to_string(&f).unwrap(),
                format!("\"{}\"", f.name())
            );
        }
        assert!("cycle".parse::<ChainFamily>().is_err());
    }

    #[test]
    fn corpus_is_ergodic_and_large_enough() {
        let corpus = standard_corpus();
        assert!(corpus.len() >= 20);
        for spec in &corpus {
            let k = generate_chain(spec).unwrap();
            assert!(is_ergodic(&k), "{spec:?}");
            assert!((2..=8).contains(&k.dim()));
        }
    }
}
