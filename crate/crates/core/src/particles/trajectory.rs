use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::{advance, PathDiagnostics, SystemState, TieBreak};
use super::ParticleError;
use crate::model::DriftSpec;
use crate::rng::{try_run_replicas, ReplicaRng, SeedRecord};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepConfig<T> {
    pub dt: T,
    /// Total simulated time; must be a whole number of steps. Zero is
    /// allowed and yields only the initial sample.
    pub horizon: T,
    pub record_every: usize,
    pub tie_break: TieBreak,
    /// Band half-width for the local-time counters, if wanted.
    pub local_time_eps: Option<T>,
    pub track_occupation: bool,
}

impl<T: Real> StepConfig<T> {
    pub fn new(dt: T, horizon: T) -> Self {
        Self {
            dt,
            horizon,
            record_every: 1,
            tie_break: TieBreak::LowerIndex,
            local_time_eps: None,
            track_occupation: true,
        }
    }

    /// Records only the initial and terminal samples.
    pub fn endpoints_only(mut self) -> Self {
        self.record_every = usize::MAX;
        self
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn with_local_time(mut self, eps: T) -> Self {
        self.local_time_eps = Some(eps);
        self
    }

    pub fn without_occupation(mut self) -> Self {
        self.track_occupation = false;
        self
    }

    /// Number of steps, after checking the configuration.
    pub fn steps(&self) -> Result<u64, ParticleError> {
        let bad = |why: &str| Err(ParticleError::InvalidConfig(why.to_string()));
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return bad("dt must be positive and finite");
        }
        if !(self.horizon >= T::zero()) || !self.horizon.is_finite() {
            return bad("horizon must be nonnegative and finite");
        }
        if self.horizon > T::zero() && self.dt > self.horizon {
            return bad("dt must not exceed the horizon");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        if let Some(eps) = self.local_time_eps {
            if !(eps > T::zero()) {
                return bad("local_time_eps must be positive");
            }
        }
        let ratio = (self.horizon / self.dt).as_f64();
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-6 * steps.max(1.0) {
            return bad("horizon must be a whole number of steps");
        }
        Ok(steps as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub time: T,
    pub positions: Vec<T>,
    pub spacings: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub samples: Vec<Sample<T>>,
    pub diagnostics: PathDiagnostics<T>,
    pub seed: Option<SeedRecord>,
    pub drifts: Vec<T>,
    pub dt: T,
    pub record_every: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn particles(&self) -> usize {
        self.drifts.len()
    }

    pub fn initial(&self) -> &Sample<T> {
        &self.samples[0]
    }

    pub fn terminal(&self) -> &Sample<T> {
        self.samples
            .last()
            .expect("trajectory has its initial sample")
    }

    pub fn final_time(&self) -> T {
        self.terminal().time
    }

    /// `X̄(t) - X̄(0)` between the first and last samples.
    pub fn com_shift(&self) -> T {
        let p = &self.diagnostics.com_path;
        p[p.len() - 1] - p[0]
    }
}

fn sample_of<T: Real>(state: &SystemState<T>) -> Sample<T> {
    Sample {
        time: state.time,
        positions: state.positions().to_vec(),
        spacings: state.spacings(),
    }
}

/// Simulates the rank-drift system from `initial`, drawing standard normals
/// from `rng` in particle-index order at each step.
pub fn run_finite<T: Real, R: Rng + ?Sized>(
    initial: &[T],
    drifts: &DriftSpec<T>,
    cfg: &StepConfig<T>,
    rng: &mut R,
) -> Result<Trajectory<T>, ParticleError> {
    run_finite_with_noise(initial, drifts, cfg, |_, buf| {
        for z in buf.iter_mut() {
            *z = T::standard_normal(rng);
        }
    })
}

/// As [`run_finite`] with a caller-supplied noise source; `noise(step, buf)`
/// fills one standard normal per particle.
pub fn run_finite_with_noise<T: Real, F>(
    initial: &[T],
    drifts: &DriftSpec<T>,
    cfg: &StepConfig<T>,
    mut noise: F,
) -> Result<Trajectory<T>, ParticleError>
where
    F: FnMut(u64, &mut [T]),
{
    let steps = cfg.steps()?;
    let n = drifts.len();
    if initial.len() != n {
        return Err(ParticleError::LengthMismatch {
            expected: n,
            got: initial.len(),
        });
    }
    let mut state = SystemState::new(initial.to_vec())?;
    let mut diag = PathDiagnostics::new(n, cfg.dt, cfg.track_occupation, cfg.local_time_eps);
    let mut samples = vec![sample_of(&state)];
    diag.record_sample(&state);

    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let mut buf = vec![T::zero(); n];
    for step in 1..=steps {
        noise(step, &mut buf);
        advance(
            &mut state,
            drifts.as_slice(),
            dt,
            sqrt_dt,
            &buf,
            Some(&mut diag),
            step,
        )?;
        state.time = T::from_f64_lossy(step as f64) * dt;
        if step % cfg.record_every as u64 == 0 || step == steps {
            samples.push(sample_of(&state));
            diag.record_sample(&state);
        }
    }
    Ok(Trajectory {
        samples,
        diagnostics: diag,
        seed: None,
        drifts: drifts.as_slice().to_vec(),
        dt,
        record_every: cfg.record_every,
    })
}

/// Runs one replica on its own stream and stamps the seed into the result.
pub fn run_replica<T: Real>(
    initial: &[T],
    drifts: &DriftSpec<T>,
    cfg: &StepConfig<T>,
    seed: SeedRecord,
) -> Result<Trajectory<T>, ParticleError> {
    let mut rng = seed.rng();
    let mut traj = run_finite(initial, drifts, cfg, &mut rng)?;
    traj.seed = Some(seed);
    Ok(traj)
}

/// Per-replica trajectories of one experiment, ordered by replica index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult<T> {
    pub master_seed: u64,
    pub trajectories: Vec<Trajectory<T>>,
}

impl<T: Real> EnsembleResult<T> {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Terminal value of spacing `j` (0-based) in every replica.
    pub fn terminal_spacing(&self, j: usize) -> Vec<f64> {
        self.trajectories
            .iter()
            .map(|t| t.terminal().spacings[j].as_f64())
            .collect()
    }

    pub fn initial_spacing(&self, j: usize) -> Vec<f64> {
        self.trajectories
            .iter()
            .map(|t| t.initial().spacings[j].as_f64())
            .collect()
    }

    pub fn terminal_spacings(&self) -> Vec<Vec<f64>> {
        let m = self
            .trajectories
            .first()
            .map_or(0, |t| t.terminal().spacings.len());
        (0..m).map(|j| self.terminal_spacing(j)).collect()
    }

    pub fn log_weights(&self) -> Vec<f64> {
        self.trajectories
            .iter()
            .map(|t| t.diagnostics.log_weight.as_f64())
            .collect()
    }
}

/// Runs `replicas` trajectories in parallel. Each replica first draws its
/// initial configuration from `init` on its own stream, then simulates.
pub fn run_ensemble<T, F>(
    master_seed: u64,
    replicas: usize,
    drifts: &DriftSpec<T>,
    cfg: &StepConfig<T>,
    init: F,
) -> Result<EnsembleResult<T>, ParticleError>
where
    T: Real,
    F: Fn(&mut ReplicaRng) -> Vec<T> + Sync + Send,
{
    cfg.steps()?;
    let trajectories = try_run_replicas(master_seed, replicas, |seed, rng| {
        let initial = init(rng);
        let mut traj = run_finite(&initial, drifts, cfg, rng)?;
        traj.seed = Some(seed);
        Ok::<_, ParticleError>(traj)
    })?;
    Ok(EnsembleResult {
        master_seed,
        trajectories,
    })
}
