//! Named experiments. Each is a pure function of its configuration: paths
//! are keyed by `(seed, stream = trajectory index)` and all reductions run in
//! index order, so reports do not depend on the thread count.

use rayon::prelude::*;

use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::report::{Artifact, ExperimentReport};

pub mod convergence;
pub mod exit_dist;
pub mod large_time;
pub mod modulus;
pub mod noise_selftest;
pub mod scaling;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerics(#[from] peano_core::Error),
}

impl LabError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerics(peano_core::Error::Domain(_) | peano_core::Error::ExitHorizon { .. }) => 2,
            LabError::Numerics(_) => 1,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;

pub struct Outcome {
    pub report: ExperimentReport,
    pub artifacts: Vec<Artifact>,
}

pub fn run(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Convergence => convergence::run(cfg),
        Experiment::Scaling => scaling::run(cfg),
        Experiment::LargeTime => large_time::run(cfg),
        Experiment::ExitDist => exit_dist::run(cfg),
        Experiment::Modulus => modulus::run(cfg),
        Experiment::NoiseSelftest => noise_selftest::run(cfg),
    }
}

/// Runs `job(i)` for `i in 0..n` on the worker pool, results in index order.
pub(crate) fn ensemble<T: Send>(n: usize, job: impl Fn(u64) -> LabResult<T> + Sync) -> LabResult<Vec<T>> {
    let job = &job;
    (0..n as u64).into_par_iter().map(job).collect()
}
