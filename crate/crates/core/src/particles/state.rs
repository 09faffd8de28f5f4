use serde::{Deserialize, Serialize};

use super::ParticleError;
use crate::scalar::Real;

/// Tie-break for equal positions. The only policy is "lower index gets the
/// lower rank", i.e. a stable sort by `(position, index)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowerIndex,
}

/// Positions of N particles together with their ranks.
///
/// Ranks are 0-based: `rank_of[i] == 0` marks the lowest particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState<T> {
    pub time: T,
    positions: Vec<T>,
    rank_of: Vec<usize>,
    order: Vec<usize>,
}

#[inline]
fn before<T: PartialOrd>(pos: &[T], a: usize, b: usize) -> bool {
    pos[a] < pos[b] || (pos[a] == pos[b] && a < b)
}

impl<T: Real> SystemState<T> {
    pub fn new(positions: Vec<T>) -> Result<Self, ParticleError> {
        Self::at_time(T::zero(), positions)
    }

    pub fn at_time(time: T, positions: Vec<T>) -> Result<Self, ParticleError> {
        if positions.is_empty() {
            return Err(ParticleError::EmptySystem);
        }
        if let Some(index) = positions.iter().position(|x| !x.is_finite()) {
            return Err(ParticleError::NonFinitePosition { index, step: 0 });
        }
        let n = positions.len();
        let mut state = Self {
            time,
            positions,
            rank_of: vec![0; n],
            order: (0..n).collect(),
        };
        state.rerank();
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    /// 0-based rank of each particle index.
    pub fn rank_of(&self) -> &[usize] {
        &self.rank_of
    }

    /// Particle index holding each rank, lowest first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn ordered_positions(&self) -> Vec<T> {
        self.order.iter().map(|&i| self.positions[i]).collect()
    }

    /// Position of the particle with 0-based rank `rank`.
    #[inline]
    pub fn ranked(&self, rank: usize) -> T {
        self.positions[self.order[rank]]
    }

    pub fn spacings(&self) -> Vec<T> {
        self.order
            .windows(2)
            .map(|w| self.positions[w[1]] - self.positions[w[0]])
            .collect()
    }

    pub fn center_of_mass(&self) -> T {
        self.positions.iter().fold(T::zero(), |s, &x| s + x) / T::from_count(self.len())
    }

    /// Restores `order` and `rank_of` after positions moved.
    ///
    /// Insertion sort starting from the previous order: O(N) when few ranks
    /// swapped, and the `(position, index)` key makes the result unique.
    pub(crate) fn rerank(&mut self) {
        let pos = &self.positions;
        let order = &mut self.order;
        for k in 1..order.len() {
            let cur = order[k];
            let mut m = k;
            while m > 0 && before(pos, cur, order[m - 1]) {
                order[m] = order[m - 1];
                m -= 1;
            }
            order[m] = cur;
        }
        for (r, &i) in order.iter().enumerate() {
            self.rank_of[i] = r;
        }
    }
}

/// Spacings of an unordered configuration.
pub fn spacings_of<T: Real>(positions: &[T]) -> Vec<T> {
    let mut v = positions.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

/// One Euler-Maruyama step with ranks frozen at the start of the step:
/// `X_i += drift[rank(i)] dt + sqrt(dt) noise_i`.
pub fn em_step<T: Real>(
    state: &SystemState<T>,
    drifts: &[T],
    dt: T,
    noise: &[T],
) -> Result<SystemState<T>, ParticleError> {
    let mut next = state.clone();
    advance(&mut next, drifts, dt, dt.sqrt(), noise, None, 0)?;
    next.time = state.time + dt;
    Ok(next)
}

/// Running diagnostics updated alongside each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDiagnostics<T> {
    pub dt: T,
    pub steps: u64,
    /// Rank martingales at the current time.
    pub beta: Vec<T>,
    /// Rank martingales at each recorded sample.
    pub beta_path: Vec<Vec<T>>,
    /// Step counts, row = particle index, column = rank (row-major N x N).
    pub occupation: Option<Vec<u64>>,
    pub local_time_eps: Option<T>,
    /// Per boundary, number of steps that began with spacing / sqrt 2 <= eps.
    pub local_time_counts: Vec<u64>,
    /// Center of mass at each recorded sample.
    pub com_path: Vec<T>,
    /// Accumulated log of the exponential martingale of the driving noise.
    pub log_weight: T,
    /// Steps that began with three consecutive ranks within 10 sqrt(dt).
    pub triple_near_steps: u64,
}

impl<T: Real> PathDiagnostics<T> {
    pub fn new(n: usize, dt: T, track_occupation: bool, local_time_eps: Option<T>) -> Self {
        Self {
            dt,
            steps: 0,
            beta: vec![T::zero(); n],
            beta_path: Vec::new(),
            occupation: track_occupation.then(|| vec![0; n * n]),
            local_time_eps,
            local_time_counts: if local_time_eps.is_some() {
                vec![0; n.saturating_sub(1)]
            } else {
                Vec::new()
            },
            com_path: Vec::new(),
            log_weight: T::zero(),
            triple_near_steps: 0,
        }
    }

    pub fn particles(&self) -> usize {
        self.beta.len()
    }

    pub fn elapsed(&self) -> T {
        T::from_f64_lossy(self.steps as f64) * self.dt
    }

    /// Time spent by particle `index` at 0-based rank `rank`.
    pub fn occupation_time(&self, index: usize, rank: usize) -> Option<T> {
        let n = self.particles();
        self.occupation
            .as_ref()
            .map(|occ| T::from_f64_lossy(occ[index * n + rank] as f64) * self.dt)
    }

    pub fn occupation_matrix(&self) -> Option<Vec<Vec<T>>> {
        let n = self.particles();
        self.occupation.as_ref()?;
        Some(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|r| self.occupation_time(i, r).unwrap())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn triple_near_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.triple_near_steps as f64 / self.steps as f64
        }
    }

    pub(crate) fn record_sample(&mut self, state: &SystemState<T>) {
        self.beta_path.push(self.beta.clone());
        self.com_path.push(state.center_of_mass());
    }
}

/// Shared step kernel. Diagnostics see the pre-step configuration.
#[allow(clippy::needless_range_loop)]
pub(crate) fn advance<T: Real>(
    state: &mut SystemState<T>,
    drifts: &[T],
    dt: T,
    sqrt_dt: T,
    noise: &[T],
    diag: Option<&mut PathDiagnostics<T>>,
    step: u64,
) -> Result<(), ParticleError> {
    let n = state.len();
    if drifts.len() != n {
        return Err(ParticleError::LengthMismatch {
            expected: n,
            got: drifts.len(),
        });
    }
    if noise.len() != n {
        return Err(ParticleError::LengthMismatch {
            expected: n,
            got: noise.len(),
        });
    }
    if let Some(index) = noise.iter().position(|z| !z.is_finite()) {
        return Err(ParticleError::NonFiniteNoise { index, step });
    }

    if let Some(diag) = diag {
        observe(state, diag, dt);
        let half = T::from_f64_lossy(0.5);
        for i in 0..n {
            let r = state.rank_of[i];
            let d = drifts[r];
            let kick = sqrt_dt * noise[i];
            let inc = d * dt + kick;
            state.positions[i] = state.positions[i] + inc;
            diag.beta[r] = diag.beta[r] + inc;
            if d != T::zero() {
                diag.log_weight = diag.log_weight + d * kick - half * d * d * dt;
            }
        }
        diag.steps += 1;
    } else {
        for i in 0..n {
            let d = drifts[state.rank_of[i]];
            state.positions[i] = state.positions[i] + d * dt + sqrt_dt * noise[i];
        }
    }

    if let Some(index) = state.positions.iter().position(|x| !x.is_finite()) {
        return Err(ParticleError::NonFinitePosition { index, step });
    }
    state.rerank();
    Ok(())
}

fn observe<T: Real>(state: &SystemState<T>, diag: &mut PathDiagnostics<T>, dt: T) {
    let n = state.len();
    if let Some(occ) = diag.occupation.as_mut() {
        for (i, &r) in state.rank_of.iter().enumerate() {
            occ[i * n + r] += 1;
        }
    }
    if let Some(eps) = diag.local_time_eps {
        let band = eps * T::from_f64_lossy(std::f64::consts::SQRT_2);
        for (j, c) in diag.local_time_counts.iter_mut().enumerate() {
            if state.ranked(j + 1) - state.ranked(j) <= band {
                *c += 1;
            }
        }
    }
    if n >= 3 {
        let near = T::from_f64_lossy(10.0) * dt.sqrt();
        if (0..n - 2).any(|j| state.ranked(j + 2) - state.ranked(j) <= near) {
            diag.triple_near_steps += 1;
        }
    }
}
