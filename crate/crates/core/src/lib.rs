//! Rank-dependent interacting Brownian particle systems.
//!
//! Finite systems with arbitrary rank drifts, the finite and infinite Atlas
//! models, and normally reflected Brownian motion in polyhedra, together
//! with the estimators and tests used to check their stationary laws.
//!
//! The drift algebra in [`model`] is generic over any [`Scalar`] (floats or
//! exact rationals); the simulators are generic over [`Real`] floats.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod infinite;
pub mod model;
pub mod particles;
pub mod rbm;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use scalar::{Real, Scalar};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

use num_rational::Rational64;

pub type DriftSpec64 = model::DriftSpec<f64>;
pub type DriftSpec32 = model::DriftSpec<f32>;
pub type RationalDriftSpec = model::DriftSpec<Rational64>;
pub type AlphaVector64 = model::AlphaVector<f64>;
pub type RationalAlphaVector = model::AlphaVector<Rational64>;
pub type SpacingLaw64 = model::StationarySpacingLaw<f64>;
pub type SystemState64 = particles::SystemState<f64>;
pub type StepConfig64 = particles::StepConfig<f64>;
pub type Trajectory64 = particles::Trajectory<f64>;
pub type Trajectory32 = particles::Trajectory<f32>;
pub type Polyhedron64 = rbm::Polyhedron<f64>;
