//! Tagged-particle fluctuations: the driftless Harris system and the
//! exploratory Atlas analogue.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::bounds::{key_estimate_bound, ln_gammasq_bound, KeyEstimate};
use super::truncation::fit_step;
use super::InfiniteError;
use crate::model::DriftSpec;
use crate::particles::{run_finite, StepConfig};
use crate::rng::try_run_replicas;
use crate::stats::{scaling_exponent_fit, LinearFit};

/// Sample spread of `X(t) - X(0)` for one `(t, k)` pair. `ci_lo`/`ci_hi`
/// bracket the standard deviation (95%, delta method on the sample kurtosis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadSummary {
    pub t: f64,
    pub k: usize,
    pub mean: f64,
    pub sd: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_replicas: usize,
}

pub fn summarize(t: f64, k: usize, xs: &[f64]) -> SpreadSummary {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let sd = (m2 * n / (n - 1.0).max(1.0)).sqrt();
    let se = if m2 > 0.0 {
        sd * ((m4 / (m2 * m2) - 1.0).max(0.0) / (4.0 * n)).sqrt()
    } else {
        0.0
    };
    SpreadSummary {
        t,
        k,
        mean,
        sd,
        ci_lo: (sd - 1.96 * se).max(0.0),
        ci_hi: sd + 1.96 * se,
        n_replicas: xs.len(),
    }
}

fn check_grid(t_grid: &[f64]) -> Result<(), InfiniteError> {
    if t_grid.is_empty()
        || t_grid[0] < 0.0
        || t_grid.windows(2).any(|w| w[1] <= w[0])
        || t_grid.iter().any(|t| !t.is_finite())
    {
        return Err(InfiniteError::InvalidParameter(
            "time grid must be nonempty, finite, nonnegative and increasing".into(),
        ));
    }
    Ok(())
}

/// Particles per side so that `sum_{i > m} E exp(-Y_i^2 / 4t) <= tol`, with
/// `Y_i ~ Gamma(i, density)` the initial gap to the i-th neighbour and `2t`
/// the variance of a relative displacement.
pub fn harris_per_side(density: f64, t_max: f64, tol: f64) -> Result<usize, InfiniteError> {
    if !(density > 0.0) || !(tol > 0.0) {
        return Err(InfiniteError::InvalidParameter(
            "density and tol must be positive".into(),
        ));
    }
    if t_max == 0.0 {
        return Ok(1);
    }
    let term = |i: usize| ln_gammasq_bound(i as f64, density, 2.0 * t_max).map(f64::exp);
    let mut m = 1usize;
    loop {
        // Terms decay faster than geometrically once past their peak, so
        // the sum is truncated when a term falls below 1e-6 of the tolerance.
        let mut tail = 0.0;
        let mut i = m + 1;
        loop {
            let v = term(i)?;
            tail += v;
            if (v < tol * 1e-6 && i > m + 10 && v < term(i - 1)?) || i > m + 100_000 {
                break;
            }
            i += 1;
        }
        if tail <= tol {
            return Ok(m);
        }
        m += 1;
        if m > 1_000_000 {
            return Err(InfiniteError::Unreachable {
                epsilon: tol,
                n_cap: 1_000_000,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarrisConfig {
    pub replicas: usize,
    pub tol: f64,
    pub per_side: Option<usize>,
}

impl Default for HarrisConfig {
    fn default() -> Self {
        Self {
            replicas: 2000,
            tol: 1e-3,
            per_side: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarrisRun {
    pub lambda: f64,
    /// Particle density on each side, `2 lambda`.
    pub density: f64,
    pub per_side: usize,
    pub t_grid: Vec<f64>,
    /// `samples[g][r]`: tagged position at `t_grid[g]` in replica `r`.
    pub samples: Vec<Vec<f64>>,
    pub summaries: Vec<SpreadSummary>,
    /// Slope of `log sd` against `log t` over the positive grid times.
    pub fit: Option<LinearFit>,
    /// `Var / sqrt(t)` at the largest grid time.
    pub var_ratio_at_max: Option<f64>,
}

/// Driftless ordered Brownian motions from a two-sided Poisson configuration
/// with density `2 lambda` per side (a particle at 0), tagged by rank.
///
/// Without drift the ordered system is the order statistics of independent
/// Brownian motions, so the tagged rank is sampled exactly at each grid
/// time from Gaussian increments; no time stepping is involved.
pub fn harris_tagged_run(
    lambda: f64,
    t_grid: &[f64],
    cfg: &HarrisConfig,
    master_seed: u64,
) -> Result<HarrisRun, InfiniteError> {
    if !(lambda > 0.0) {
        return Err(InfiniteError::InvalidParameter(
            "lambda must be positive".into(),
        ));
    }
    check_grid(t_grid)?;
    let density = 2.0 * lambda;
    let t_max = *t_grid.last().unwrap();
    let m = match cfg.per_side {
        Some(m) => m,
        None => harris_per_side(density, t_max, cfg.tol)?,
    };
    let count = 2 * m + 1;
    let per_replica = try_run_replicas(master_seed, cfg.replicas, |_, rng| {
        let mut x = two_sided(rng, density, m);
        let mut work = vec![0.0; count];
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let sd = (t - prev).sqrt();
            if sd > 0.0 {
                for xi in x.iter_mut() {
                    *xi += sd * rng.sample::<f64, _>(StandardNormal);
                }
            }
            prev = t;
            work.copy_from_slice(&x);
            let (_, mid, _) = work.select_nth_unstable_by(m, f64::total_cmp);
            out.push(*mid);
        }
        Ok::<_, InfiniteError>(out)
    })?;
    let samples: Vec<Vec<f64>> = (0..t_grid.len())
        .map(|g| per_replica.iter().map(|r| r[g]).collect())
        .collect();
    let summaries: Vec<SpreadSummary> = t_grid
        .iter()
        .zip(&samples)
        .map(|(&t, s)| summarize(t, 0, s))
        .collect();
    let positive: Vec<&SpreadSummary> = summaries.iter().filter(|s| s.t > 0.0).collect();
    let fit = scaling_exponent_fit(
        &positive.iter().map(|s| s.t).collect::<Vec<_>>(),
        &positive.iter().map(|s| s.sd).collect::<Vec<_>>(),
    )
    .ok();
    let var_ratio_at_max = summaries
        .last()
        .filter(|s| s.t > 0.0)
        .map(|s| s.sd * s.sd / s.t.sqrt());
    Ok(HarrisRun {
        lambda,
        density,
        per_side: m,
        t_grid: t_grid.to_vec(),
        samples,
        summaries,
        fit,
        var_ratio_at_max,
    })
}

fn two_sided<R: Rng + ?Sized>(rng: &mut R, density: f64, m: usize) -> Vec<f64> {
    let mut x = vec![0.0; 2 * m + 1];
    let mut acc = 0.0;
    for k in 1..=m {
        acc += rng.sample::<f64, _>(Exp1) / density;
        x[m + k] = acc;
    }
    acc = 0.0;
    for k in 1..=m {
        acc += rng.sample::<f64, _>(Exp1) / density;
        x[m - k] = -acc;
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureConfig {
    pub dt: f64,
    pub replicas: usize,
    pub tol: f64,
    pub particles: Option<usize>,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            replicas: 200,
            tol: 1e-3,
            particles: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub spread: SpreadSummary,
    /// `sd / t^(1/4) * sqrt(2 delta) / (2/pi)^(1/4)` with its interval.
    pub c_hat: f64,
    pub c_hat_lo: f64,
    pub c_hat_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub delta: f64,
    pub particles: usize,
    pub rows: Vec<ConjectureRow>,
}

/// Exploratory estimates of the normalising constants `c_k` for the Atlas
/// model started from a rate-`2 delta` Poisson configuration on `(0, inf)`.
/// Nothing is asserted.
pub fn conjecture_probe_cnjhar(
    delta: f64,
    k_list: &[usize],
    t_grid: &[f64],
    cfg: &ConjectureConfig,
    master_seed: u64,
) -> Result<ConjectureReport, InfiniteError> {
    if !(delta > 0.0) {
        return Err(InfiniteError::InvalidParameter(
            "delta must be positive".into(),
        ));
    }
    check_grid(t_grid)?;
    let k_max = *k_list
        .iter()
        .max()
        .ok_or_else(|| InfiniteError::InvalidParameter("k_list is empty".into()))?;
    if k_list.contains(&0) {
        return Err(InfiniteError::InvalidParameter("ranks are 1-based".into()));
    }
    let t_scaled = delta * delta * t_grid.last().unwrap();
    let particles = match cfg.particles {
        Some(n) => n,
        None => (k_max + 2..=1_000_000)
            .find(|&n| {
                key_estimate_bound(KeyEstimate::Ke2 { k: k_max, n }, t_scaled)
                    .value
                    .is_some_and(|v| v <= cfg.tol)
            })
            .ok_or(InfiniteError::Unreachable {
                epsilon: cfg.tol,
                n_cap: 1_000_000,
            })?,
    };
    if particles <= k_max {
        return Err(InfiniteError::InvalidParameter(
            "need more particles than the largest rank".into(),
        ));
    }
    let drifts = DriftSpec::atlas(particles, delta)?;
    let per_replica = try_run_replicas(master_seed, cfg.replicas, |_, rng| {
        let mut x = Vec::with_capacity(particles);
        let mut acc = 0.0;
        for _ in 0..particles {
            acc += rng.sample::<f64, _>(Exp1) / (2.0 * delta);
            x.push(acc);
        }
        let start: Vec<f64> = k_list.iter().map(|&k| x[k - 1]).collect();
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            if t > prev {
                let (dt, steps) = fit_step(t - prev, cfg.dt);
                let step_cfg = StepConfig::new(dt, dt * steps as f64)
                    .endpoints_only()
                    .without_occupation();
                let traj = run_finite(&x, &drifts, &step_cfg, rng)?;
                x = traj.terminal().positions.clone();
            }
            prev = t;
            let mut sorted = x.clone();
            sorted.sort_by(f64::total_cmp);
            out.push(
                k_list
                    .iter()
                    .zip(&start)
                    .map(|(&k, s)| sorted[k - 1] - s)
                    .collect::<Vec<_>>(),
            );
        }
        Ok::<_, InfiniteError>(out)
    })?;
    let norm = (2.0 * delta).sqrt() / (2.0 / PI).powf(0.25);
    let mut rows = Vec::new();
    for (g, &t) in t_grid.iter().enumerate() {
        for (ki, &k) in k_list.iter().enumerate() {
            let xs: Vec<f64> = per_replica.iter().map(|r| r[g][ki]).collect();
            let spread = summarize(t, k, &xs);
            let scale = if t > 0.0 { norm / t.powf(0.25) } else { 0.0 };
            rows.push(ConjectureRow {
                c_hat: spread.sd * scale,
                c_hat_lo: spread.ci_lo * scale,
                c_hat_hi: spread.ci_hi * scale,
                spread,
            });
        }
    }
    Ok(ConjectureReport {
        delta,
        particles,
        rows,
    })
}
