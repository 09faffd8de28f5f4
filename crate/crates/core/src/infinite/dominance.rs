//! Monte Carlo frequencies of the events the key estimates bound.

use serde::{Deserialize, Serialize};

use super::bounds::KeyEstimate;
use super::initial::{sample_initial, InitialLaw};
use super::InfiniteError;
use crate::rng::try_run_replicas;
use crate::scalar::Real;
use crate::stats::binomial_se;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventFrequency {
    pub variant: KeyEstimate,
    pub t: f64,
    pub dt: f64,
    pub replicas: usize,
    pub hits: usize,
    pub frequency: f64,
    pub se: f64,
}

/// k-th smallest (1-based) of `xs`, reusing `buf`.
fn kth_smallest(xs: &[f64], k: usize, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend_from_slice(xs);
    let (_, v, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    *v
}

/// Frequency of the complement event over `[0, t]` for independent driftless
/// Brownian motions, monitored on a grid of step `dt`:
///
/// - KE1: some index beyond `n` drops below the minimum of the first `n`;
/// - KE2: some index beyond `n` drops below the k-th smallest of the first `n`;
/// - KE3: under `mu_n`, some index in `j+1..=n` drops below the k-th smallest
///   of the first `j`.
///
/// KE1/KE2 start from `mu` with rate 2 and carry `padding` extra particles
/// beyond `n`. Crossings between grid points are missed, so the frequency
/// is biased low by an amount that vanishes with `dt`.
pub fn complement_frequency(
    variant: KeyEstimate,
    t: f64,
    dt: f64,
    replicas: usize,
    padding: usize,
    master_seed: u64,
) -> Result<EventFrequency, InfiniteError> {
    if !(t > 0.0) || !(dt > 0.0) || replicas == 0 {
        return Err(InfiniteError::InvalidParameter(
            "need t > 0, dt > 0 and replicas > 0".into(),
        ));
    }
    let (law, count, inside, k) = match variant {
        KeyEstimate::Ke1 { n } => (InitialLaw::Mu { delta: 1.0 }, n + padding, n, 1),
        KeyEstimate::Ke2 { k, n } => (InitialLaw::Mu { delta: 1.0 }, n + padding, n, k),
        KeyEstimate::Ke3 { k, j, n } => (InitialLaw::MuN { n }, n, j, k),
    };
    if k == 0 || k > inside || inside >= count {
        return Err(InfiniteError::InvalidParameter(format!(
            "inconsistent indices in {variant:?}"
        )));
    }
    let steps = (t / dt).round().max(1.0) as u64;
    let sd = (t / steps as f64).sqrt();
    let hit = try_run_replicas(master_seed, replicas, |_, rng| {
        let mut x = sample_initial(&law, count, rng)?;
        let mut buf = Vec::with_capacity(inside);
        for _ in 0..steps {
            for xi in x.iter_mut() {
                *xi += sd * f64::standard_normal(rng);
            }
            let level = kth_smallest(&x[..inside], k, &mut buf);
            if x[inside..].iter().any(|&y| y < level) {
                return Ok::<_, InfiniteError>(true);
            }
        }
        Ok(false)
    })?;
    let hits = hit.iter().filter(|&&h| h).count();
    let frequency = hits as f64 / replicas as f64;
    Ok(EventFrequency {
        variant,
        t,
        dt: t / steps as f64,
        replicas,
        hits,
        frequency,
        se: binomial_se(frequency, replicas),
    })
}
