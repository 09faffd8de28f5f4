//! Euler-Maruyama simulation of finite rank-drift systems
//! `dX_i = delta_{rank(i)} dt + dW_i`, with spacing extraction and the
//! path diagnostics used by the verification experiments.

mod checks;
mod export;
mod state;
mod trajectory;

pub use checks::{
    center_of_mass_checks, girsanov_log_weight, girsanov_reweight, local_time_estimate,
    local_time_from_counters, rank_martingale_checks, spacing_growth_probe, time_reversal_test,
    CenterOfMassReport, LocalTimeEstimate, ProjectionTest, RankMartingaleReport, ReversalReport,
    SpacingGrowthReport,
};
pub use export::{diagnostics_json, write_spacings_csv, write_trajectory_csv};
pub use state::{em_step, spacings_of, PathDiagnostics, SystemState, TieBreak};
pub use trajectory::{
    run_ensemble, run_finite, run_finite_with_noise, run_replica, EnsembleResult, Sample,
    StepConfig, Trajectory,
};

use thiserror::Error;

use crate::stats::StatsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParticleError {
    #[error("system has no particles")]
    EmptySystem,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("noise entry {index} is not finite at step {step}")]
    NonFiniteNoise { index: usize, step: u64 },
    #[error("position {index} is not finite at step {step}")]
    NonFinitePosition { index: usize, step: u64 },
    #[error("invalid step configuration: {0}")]
    InvalidConfig(String),
    #[error("rank {rank} out of range for {particles} particles")]
    RankOutOfRange { rank: usize, particles: usize },
    #[error("reweighting needs a driftless reference trajectory")]
    DriftedReference,
    #[error("need at least {needed} replicas, got {got}")]
    TooFewReplicas { needed: usize, got: usize },
    #[error(transparent)]
    Stats(StatsError),
}
