//! Drift algebra for rank-dependent particle systems and the exact
//! stationary laws of their spacings and centered configurations.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Real, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a rank-drift system needs at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("drift at rank {rank} is not finite")]
    NonFinite { rank: usize },
    #[error("spacings are not tight: alpha_{k} <= 0")]
    NotTight { k: usize },
    #[error("alpha_{k} must be strictly positive")]
    NonPositiveAlpha { k: usize },
    #[error("target quantiles must be strictly increasing (violated at {k})")]
    NonIncreasingProfile { k: usize },
}

/// Constant drift given to the particle of each rank, lowest rank first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec<T> {
    drifts: Vec<T>,
}

impl<T: Scalar> DriftSpec<T> {
    pub fn new(drifts: Vec<T>) -> Result<Self, ModelError> {
        if drifts.len() < 2 {
            return Err(ModelError::TooFewParticles(drifts.len()));
        }
        Self::checked(drifts)
    }

    /// A lone drifting Brownian particle. Only the simulator accepts this
    /// degenerate system; the stationary theory needs two particles or more.
    pub fn single_particle(drift: T) -> Result<Self, ModelError> {
        Self::checked(vec![drift])
    }

    /// Atlas model: drift `delta` on the lowest particle, zero elsewhere.
    pub fn atlas(n: usize, delta: T) -> Result<Self, ModelError> {
        let mut drifts = vec![T::zero(); n];
        if let Some(first) = drifts.first_mut() {
            *first = delta;
        }
        Self::new(drifts)
    }

    pub fn zeros(n: usize) -> Result<Self, ModelError> {
        Self::new(vec![T::zero(); n])
    }

    fn checked(drifts: Vec<T>) -> Result<Self, ModelError> {
        if let Some(rank) = drifts.iter().position(|d| !d.is_finite_value()) {
            return Err(ModelError::NonFinite { rank: rank + 1 });
        }
        Ok(Self { drifts })
    }

    pub fn len(&self) -> usize {
        self.drifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.drifts.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.drifts
    }

    /// Drift of the particle holding 0-based rank `rank`.
    #[inline]
    pub fn at_rank(&self, rank: usize) -> T {
        self.drifts[rank]
    }

    pub fn is_zero(&self) -> bool {
        self.drifts.iter().all(|d| d.is_zero())
    }

    pub fn mean(&self) -> T {
        let sum = self.drifts.iter().fold(T::zero(), |acc, &d| acc + d);
        sum / T::from_count(self.drifts.len())
    }

    /// Same system with `c` added to every drift.
    pub fn shifted(&self, c: T) -> Self {
        Self {
            drifts: self.drifts.iter().map(|&d| d + c).collect(),
        }
    }
}

/// Partial sums of centered drifts, `alphas[k-1] = sum_{i<=k} (drift_i - mean)`.
///
/// The trailing entry is kept and is exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaVector<T> {
    pub alphas: Vec<T>,
    pub mean_drift: T,
}

impl<T: Scalar> AlphaVector<T> {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// The N-1 entries that govern the spacings.
    pub fn interior(&self) -> &[T] {
        &self.alphas[..self.alphas.len().saturating_sub(1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Tightness {
    Tight,
    /// `k` is the smallest 1-based index with `alpha_k <= 0`.
    NotTight {
        k: usize,
    },
}

impl Tightness {
    pub fn is_tight(&self) -> bool {
        matches!(self, Tightness::Tight)
    }
}

/// Independent exponential spacings; `rates[j] = 2 alpha_{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySpacingLaw<T> {
    rates: Vec<T>,
}

impl<T: Scalar> StationarySpacingLaw<T> {
    pub fn from_rates(rates: Vec<T>) -> Result<Self, ModelError> {
        if let Some(k) = rates
            .iter()
            .position(|r| !(*r > T::zero()) || !r.is_finite_value())
        {
            return Err(ModelError::NonPositiveAlpha { k: k + 1 });
        }
        Ok(Self { rates })
    }

    pub fn rates(&self) -> &[T] {
        &self.rates
    }

    /// Number of particles in the system the law belongs to.
    pub fn particles(&self) -> usize {
        self.rates.len() + 1
    }
}

/// One draw of the centered stationary configuration, indexed by particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredStationarySample<T> {
    pub positions: Vec<T>,
}

pub fn compute_alphas<T: Scalar>(drifts: &DriftSpec<T>) -> AlphaVector<T> {
    let mean_drift = drifts.mean();
    let mut acc = T::zero();
    let mut alphas: Vec<T> = drifts
        .as_slice()
        .iter()
        .map(|&d| {
            acc = acc + (d - mean_drift);
            acc
        })
        .collect();
    // The full centered sum telescopes to zero; rounding must not leak in.
    if let Some(last) = alphas.last_mut() {
        *last = T::zero();
    }
    AlphaVector { alphas, mean_drift }
}

pub fn check_tightness<T: Scalar>(alphas: &AlphaVector<T>) -> Tightness {
    match alphas.interior().iter().position(|a| !(*a > T::zero())) {
        Some(k) => Tightness::NotTight { k: k + 1 },
        None => Tightness::Tight,
    }
}

pub fn stationary_spacing_law<T: Scalar>(
    alphas: &AlphaVector<T>,
) -> Result<StationarySpacingLaw<T>, ModelError> {
    if let Tightness::NotTight { k } = check_tightness(alphas) {
        return Err(ModelError::NotTight { k });
    }
    let two = T::one() + T::one();
    Ok(StationarySpacingLaw {
        rates: alphas.interior().iter().map(|&a| two * a).collect(),
    })
}

/// Inverts [`compute_alphas`]: `drift_i = mean + alpha_i - alpha_{i-1}` with
/// `alpha_0 = alpha_N = 0`. `alphas` holds the N-1 interior entries.
pub fn drifts_from_alphas<T: Scalar>(
    alphas: &[T],
    mean_drift: T,
) -> Result<DriftSpec<T>, ModelError> {
    if let Some(k) = alphas.iter().position(|a| !(*a > T::zero())) {
        return Err(ModelError::NonPositiveAlpha { k: k + 1 });
    }
    let n = alphas.len() + 1;
    let at = |k: usize| -> T {
        if k == 0 || k == n {
            T::zero()
        } else {
            alphas[k - 1]
        }
    };
    DriftSpec::new((1..=n).map(|i| mean_drift + at(i) - at(i - 1)).collect())
}

/// Drifts whose stationary centered cloud approximates the distribution
/// with quantile function `quantile`.
///
/// Stationary spacing k has mean `1 / (2 alpha_k)`; matching it to the gap
/// between the target quantiles at `(k - 1/2)/n` and `(k + 1/2)/n` fixes
/// every alpha_k, and `drifts_from_alphas` does the rest.
pub fn drifts_for_profile<F>(
    quantile: F,
    n: usize,
    mean_drift: f64,
) -> Result<DriftSpec<f64>, ModelError>
where
    F: Fn(f64) -> f64,
{
    if n < 2 {
        return Err(ModelError::TooFewParticles(n));
    }
    let q: Vec<f64> = (1..=n)
        .map(|k| quantile((k as f64 - 0.5) / n as f64))
        .collect();
    let mut alphas = Vec::with_capacity(n - 1);
    for (k, w) in q.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(ModelError::NonIncreasingProfile { k: k + 1 });
        }
        alphas.push(0.5 / gap);
    }
    drifts_from_alphas(&alphas, mean_drift)
}

/// Independent draws `Y_j ~ Exp(rate_j)`.
pub fn sample_stationary_spacings<T: Real, R: Rng + ?Sized>(
    law: &StationarySpacingLaw<T>,
    rng: &mut R,
) -> Vec<T> {
    law.rates
        .iter()
        .map(|&rate| T::standard_exponential(rng) / rate)
        .collect()
}

/// Draws the stationary centered system: ordered partial sums of the
/// spacings, assigned to particles by a uniform random permutation and
/// shifted to mean zero.
pub fn sample_centered_stationary<T: Real, R: Rng + ?Sized>(
    law: &StationarySpacingLaw<T>,
    rng: &mut R,
) -> CenteredStationarySample<T> {
    let spacings = sample_stationary_spacings(law, rng);
    let n = law.particles();
    let mut partial = Vec::with_capacity(n);
    let mut acc = T::zero();
    partial.push(acc);
    for y in spacings {
        acc = acc + y;
        partial.push(acc);
    }
    let mean = partial.iter().fold(T::zero(), |s, &x| s + x) / T::from_count(n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut positions: Vec<T> = perm.iter().map(|&p| partial[p] - mean).collect();
    // Remove the residual of the floating-point mean so the sum is tight.
    let residual = positions.iter().fold(T::zero(), |s, &x| s + x) / T::from_count(n);
    for x in &mut positions {
        *x = *x - residual;
    }
    CenteredStationarySample { positions }
}
