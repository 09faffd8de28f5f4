//! The infinite Atlas model through certified finite truncation, and the
//! tagged-particle experiments.

mod bounds;
mod dominance;
mod harris;
mod initial;
mod truncation;

pub use bounds::{
    c1, c2, gammasq_bound, gammasq_report, key_estimate_bound, ln_gammasq_bound,
    tv_bound_mu_vs_mun, tv_report, BoundReport, KeyEstimate, STIRLING_C,
};
pub use dominance::{complement_frequency, EventFrequency};
pub use harris::{
    conjecture_probe_cnjhar, harris_per_side, harris_tagged_run, summarize, ConjectureConfig,
    ConjectureReport, ConjectureRow, HarrisConfig, HarrisRun, SpreadSummary,
};
pub use initial::{check_initial_admissibility, sample_initial, AdmissibilityReport, InitialLaw};
pub use truncation::{
    choose_truncation, fit_step, run_infinite_atlas, truncation_envelope, InfiniteConfig,
    InfiniteRun, TraceEntry, TruncationPlan, DEFAULT_N_CAP,
};

use thiserror::Error;

use crate::model::ModelError;
use crate::particles::ParticleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfiniteError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("window 2J/N <= ln(2)/2 violated for J = {j}, N = {n}")]
    WindowViolation { j: usize, n: usize },
    #[error("error target {epsilon:e} not reachable with N <= {n_cap}")]
    Unreachable { epsilon: f64, n_cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Particle(#[from] ParticleError),
}
