use serde::{Deserialize, Serialize};

use super::bounds::{key_estimate_bound, BoundReport, KeyEstimate};
use super::initial::{sample_initial, InitialLaw};
use super::InfiniteError;
use crate::model::DriftSpec;
use crate::particles::{run_finite, StepConfig};
use crate::rng::try_run_replicas;

pub const DEFAULT_N_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub n: usize,
    pub envelope: f64,
}

/// Particle count certified for the lowest `k` spacings on `[0, t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub k: usize,
    pub t: f64,
    pub epsilon: f64,
    pub n: usize,
    /// `2 e^(t/2) sqrt(KE2(k+1, n, t))` at the chosen `n`.
    pub envelope: f64,
    pub bound: BoundReport,
    /// Every candidate evaluated, in scan order.
    pub bound_trace: Vec<TraceEntry>,
}

/// The error envelope `2 e^(t/2) sqrt(KE2(k+1, n, t))`, or `None` outside
/// the precondition.
pub fn truncation_envelope(k: usize, n: usize, t: f64) -> (BoundReport, Option<f64>) {
    let report = key_estimate_bound(KeyEstimate::Ke2 { k: k + 1, n }, t);
    let env = report.value.map(|v| 2.0 * (t / 2.0).exp() * v.sqrt());
    (report, env)
}

/// Smallest `n <= n_cap` inside the precondition whose envelope is at most
/// `epsilon`. At `t = 0` every admissible `n` works and `k + 2` is returned.
pub fn choose_truncation(
    k: usize,
    t: f64,
    epsilon: f64,
    n_cap: usize,
) -> Result<TruncationPlan, InfiniteError> {
    if k == 0 {
        return Err(InfiniteError::InvalidParameter(
            "k must be at least 1".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(InfiniteError::InvalidParameter(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(InfiniteError::InvalidParameter(format!(
            "t = {t} must be finite and nonnegative"
        )));
    }
    // KE2(k+1, n) needs k+1 < n and n - k + 1 >= 16 e t.
    let first = (k + 2).max((16.0 * std::f64::consts::E * t + k as f64 - 1.0).ceil() as usize);
    let mut bound_trace = Vec::new();
    for n in first..=n_cap {
        let (bound, env) = truncation_envelope(k, n, t);
        let Some(envelope) = env else { continue };
        bound_trace.push(TraceEntry { n, envelope });
        if envelope <= epsilon {
            return Ok(TruncationPlan {
                k,
                t,
                epsilon,
                n,
                envelope,
                bound,
                bound_trace,
            });
        }
    }
    Err(InfiniteError::Unreachable { epsilon, n_cap })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteConfig {
    /// Largest step; the horizon is split into equal steps no larger.
    pub dt: f64,
    pub replicas: usize,
    pub n_cap: usize,
    /// Simulate this many particles instead of the planned count, if larger.
    pub n_override: Option<usize>,
}

impl Default for InfiniteConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            replicas: 2000,
            n_cap: DEFAULT_N_CAP,
            n_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteRun {
    pub plan: TruncationPlan,
    pub particles: usize,
    pub delta: f64,
    /// Per replica, the lowest `k` initial spacings.
    pub initial_spacings: Vec<Vec<f64>>,
    /// Per replica, the lowest `k` spacings at time `t`.
    pub terminal_spacings: Vec<Vec<f64>>,
}

impl InfiniteRun {
    /// Column `j` (0-based) of the terminal spacings.
    pub fn terminal_column(&self, j: usize) -> Vec<f64> {
        self.terminal_spacings.iter().map(|s| s[j]).collect()
    }
}

/// Splits `t` into equal steps no longer than `dt`.
pub fn fit_step(t: f64, dt: f64) -> (f64, u64) {
    if t == 0.0 {
        return (dt, 0);
    }
    let steps = (t / dt).ceil().max(1.0);
    (t / steps, steps as u64)
}

/// Finite Atlas dynamics (drift `delta` on the lowest of the first `N`)
/// from `law`, with `N` from [`choose_truncation`]. Atlas scaling maps drift
/// `delta` over time `t` to drift 1 over time `delta^2 t`, so the plan is
/// built at the scaled horizon.
pub fn run_infinite_atlas(
    law: &InitialLaw,
    k: usize,
    t: f64,
    epsilon: f64,
    cfg: &InfiniteConfig,
    master_seed: u64,
) -> Result<InfiniteRun, InfiniteError> {
    law.validate()?;
    let delta = match *law {
        InitialLaw::Mu { delta } => delta,
        InitialLaw::MuN { .. } => 1.0,
        InitialLaw::PoissonTwoSided { .. } => {
            return Err(InfiniteError::InvalidParameter(
                "the Atlas model needs a one-sided initial law".into(),
            ))
        }
    };
    if !(cfg.dt > 0.0) || cfg.replicas == 0 {
        return Err(InfiniteError::InvalidParameter(
            "dt must be positive and replicas nonzero".into(),
        ));
    }
    let plan = choose_truncation(k, delta * delta * t, epsilon, cfg.n_cap)?;
    let particles = plan.n.max(cfg.n_override.unwrap_or(0));
    let drifts = DriftSpec::atlas(particles, delta)?;
    let (dt, steps) = fit_step(t, cfg.dt);
    let step_cfg = StepConfig::new(dt, dt * steps as f64)
        .endpoints_only()
        .without_occupation();
    let runs = try_run_replicas(master_seed, cfg.replicas, |_, rng| {
        let x0 = sample_initial(law, particles, rng)?;
        let traj = run_finite(&x0, &drifts, &step_cfg, rng)?;
        let first = traj.initial().spacings[..k].to_vec();
        let last = traj.terminal().spacings[..k].to_vec();
        Ok::<_, InfiniteError>((first, last))
    })?;
    let (initial_spacings, terminal_spacings) = runs.into_iter().unzip();
    Ok(InfiniteRun {
        plan,
        particles,
        delta,
        initial_spacings,
        terminal_spacings,
    })
}
