//! Estimation of the generalized contraction coefficient and mixing time of a
//! finite ergodic Markov chain from a single trajectory.
//!
//! * [`chain`]: kernels, distributions, total variation, Dobrushin coefficient.
//! * [`oracle`]: exact quantities for a known kernel.
//! * [`sampler`]: seeded trajectory simulation.
//! * [`estimator`]: empirical contraction, confidence intervals, mixing time.
//! * [`harness`]: synthetic chains and Monte Carlo experiments.

pub mod chain;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod oracle;
pub mod sampler;

pub use chain::{MarkovKernel, StateDistribution};
pub use error::{Error, Result};
pub use estimator::{ConfidenceInterval, ContractionEstimate, MixingTimeEstimate};
pub use oracle::{ExactContraction, OracleSummary, SkipContraction};
pub use sampler::{RandomSeed, Trajectory};
