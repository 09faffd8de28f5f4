//! Normally reflected Brownian motion with constant drift in a polyhedral
//! cone `{x : b_i(x) >= 0}` built from K linearly independent forms.
//!
//! When the drift decomposes as `delta = -sum a_i grad b_i` with every
//! `a_i > 0`, the stationary law makes the `b_i(R)` independent `Exp(2 a_i)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::DriftSpec;
use crate::rng::{try_run_replicas, ReplicaRng};
use crate::scalar::Real;
use crate::stats::{
    self, fit_exponential_rate, independence_check, ks_one_sample, IndependenceReport, RateFit,
    TestResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RbmError {
    #[error("coefficient matrix must be square with K >= 1 rows")]
    NotSquare,
    #[error("functionals are linearly dependent (rank {rank} < {k})")]
    RankDeficient { rank: usize, k: usize },
    #[error("entry is not finite")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("drift reconstruction residual {residual:e} too large")]
    Residual { residual: f64 },
    #[error("reflection did not reach feasibility after {sweeps} sweeps at {point:?}")]
    NoConvergence { sweeps: usize, point: Vec<f64> },
    #[error("a_{index} = {value} is not positive: no stationary law")]
    NotErgodic { index: usize, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Stats(#[from] stats::StatsError),
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve<T: Real>(m: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let k = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .zip(rhs)
        .map(|(row, &r)| {
            let mut row = row.clone();
            row.push(r);
            row
        })
        .collect();
    for col in 0..k {
        let piv =
            (col..k).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col] == T::zero() {
            return None;
        }
        a.swap(col, piv);
        for i in (col + 1)..k {
            let f = a[i][col] / a[col][col];
            for j in col..=k {
                let v = a[col][j];
                a[i][j] = a[i][j] - f * v;
            }
        }
    }
    let mut x = vec![T::zero(); k];
    for i in (0..k).rev() {
        let s = ((i + 1)..k).fold(a[i][k], |s, j| s - a[i][j] * x[j]);
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Rank by full-pivot elimination; pivots below `tol * max|entry|` count
/// as zero.
#[allow(clippy::needless_range_loop)]
fn rank<T: Real>(m: &[Vec<T>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .map(|r| r.iter().map(|x| x.as_f64()).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut r = 0;
    let mut used = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, v) in row.iter().enumerate() {
                if !used[j] && v.abs() > best.0 {
                    best = (v.abs(), i, j);
                }
            }
        }
        if best.0 <= tol * scale {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(r, pi);
        used[pj] = true;
        for i in (r + 1)..rows {
            let f = a[i][pj] / a[r][pj];
            for j in 0..cols {
                a[i][j] -= f * a[r][j];
            }
        }
        r += 1;
    }
    r
}

/// K linear forms on R^K, stored as coefficient rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron<T> {
    rows: Vec<Vec<T>>,
    norms_sq: Vec<T>,
}

impl<T: Real> Polyhedron<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, RbmError> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(RbmError::NotSquare);
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(RbmError::NonFinite);
        }
        let r = rank(&rows, 1e-10);
        if r < k {
            return Err(RbmError::RankDeficient { rank: r, k });
        }
        let norms_sq = rows
            .iter()
            .map(|r| r.iter().fold(T::zero(), |s, &x| s + x * x))
            .collect();
        Ok(Self { rows, norms_sq })
    }

    /// The Atlas wedge in R^N: spacing forms `y_{k+1} - y_k` for k < N,
    /// closed off by the half-space form `y_1 + ... + y_N`.
    pub fn atlas_wedge(n: usize) -> Result<Self, RbmError> {
        let mut rows = Vec::with_capacity(n);
        for k in 0..n.saturating_sub(1) {
            let mut r = vec![T::zero(); n];
            r[k] = -T::one();
            r[k + 1] = T::one();
            rows.push(r);
        }
        rows.push(vec![T::one(); n]);
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    #[inline]
    pub fn eval(&self, i: usize, x: &[T]) -> T {
        self.rows[i]
            .iter()
            .zip(x)
            .fold(T::zero(), |s, (&b, &y)| s + b * y)
    }

    pub fn eval_all(&self, x: &[T]) -> Vec<T> {
        (0..self.dim()).map(|i| self.eval(i, x)).collect()
    }

    /// The point with `b_i(x) = values_i`.
    pub fn point_with_values(&self, values: &[T]) -> Result<Vec<T>, RbmError> {
        solve(&self.rows, values).ok_or(RbmError::RankDeficient {
            rank: 0,
            k: self.dim(),
        })
    }

    fn tolerance(&self, i: usize, x: &[T]) -> T {
        let size = x.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        T::from_f64_lossy(1e-12) * (T::one() + size * self.norms_sq[i].sqrt())
    }

    pub fn is_feasible(&self, x: &[T]) -> bool {
        (0..self.dim()).all(|i| self.eval(i, x) >= -self.tolerance(i, x))
    }
}

/// Drift of the wedge walk for Atlas-type drifts: `delta_i - mean - theta/sqrt N`.
pub fn atlas_wedge_drift<T: Real>(drifts: &DriftSpec<T>, theta: T) -> Vec<T> {
    let shift = drifts.mean() + theta / T::from_count(drifts.len()).sqrt();
    drifts.as_slice().iter().map(|&d| d - shift).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftDecomposition<T> {
    pub a: Vec<T>,
    pub residual: f64,
}

/// Solves `delta = -sum_i a_i grad b_i` for `a`.
pub fn decompose_drift<T: Real>(
    poly: &Polyhedron<T>,
    delta: &[T],
) -> Result<DriftDecomposition<T>, RbmError> {
    let k = poly.dim();
    if delta.len() != k {
        return Err(RbmError::LengthMismatch {
            expected: k,
            got: delta.len(),
        });
    }
    let transposed: Vec<Vec<T>> = (0..k)
        .map(|c| poly.rows.iter().map(|r| r[c]).collect())
        .collect();
    let neg: Vec<T> = delta.iter().map(|&d| -d).collect();
    let a = solve(&transposed, &neg).ok_or(RbmError::RankDeficient { rank: 0, k })?;
    let residual = (0..k)
        .map(|c| {
            let v = delta[c] + (0..k).fold(T::zero(), |s, i| s + a[i] * poly.rows[i][c]);
            v.as_f64().powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let norm = delta.iter().map(|d| d.as_f64().powi(2)).sum::<f64>().sqrt();
    if residual > 1e-10 * norm.max(f64::MIN_POSITIVE) && residual > 0.0 {
        return Err(RbmError::Residual { residual });
    }
    Ok(DriftDecomposition { a, residual })
}

/// How a proposal that left the domain is brought back.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionScheme {
    /// Cyclic orthogonal projection onto violated faces.
    Projection,
    /// Cyclic mirror reflection across violated faces, finishing with
    /// projection if mirroring does not settle.
    #[default]
    Mirror,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmState<T> {
    pub time: T,
    pub point: Vec<T>,
}

fn restore<T: Real>(poly: &Polyhedron<T>, x: &mut [T], factor: T, max_sweeps: usize) -> bool {
    let k = poly.dim();
    for _ in 0..max_sweeps {
        if poly.is_feasible(x) {
            return true;
        }
        for i in 0..k {
            let b = poly.eval(i, x);
            if b < T::zero() {
                let c = factor * b / poly.norms_sq[i];
                for (y, &g) in x.iter_mut().zip(&poly.rows[i]) {
                    *y = *y - c * g;
                }
            }
        }
    }
    poly.is_feasible(x)
}

/// Exact Euclidean projection onto the cone by enumerating active sets:
/// `x = p + sum_{i in S} mu_i grad b_i` with `b_S(x) = 0` and `mu >= 0`.
/// Used when cyclic sweeps stall in sharp corners; limited to K <= 16.
fn nearest_point<T: Real>(poly: &Polyhedron<T>, x: &mut [T]) -> bool {
    let k = poly.dim();
    if k > 16 {
        return false;
    }
    let p = x.to_vec();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |s, (&u, &v)| s + u * v);
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let active: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let gram: Vec<Vec<T>> = active
            .iter()
            .map(|&i| {
                active
                    .iter()
                    .map(|&j| dot(&poly.rows[i], &poly.rows[j]))
                    .collect()
            })
            .collect();
        let rhs: Vec<T> = active.iter().map(|&i| -dot(&poly.rows[i], &p)).collect();
        let Some(mu) = solve(&gram, &rhs) else {
            continue;
        };
        if mu.iter().any(|&m| m < T::zero()) {
            continue;
        }
        let mut y = p.clone();
        for (&i, &m) in active.iter().zip(&mu) {
            for (v, &g) in y.iter_mut().zip(&poly.rows[i]) {
                *v = *v + m * g;
            }
        }
        for &i in &active {
            // Land exactly on the active faces up to rounding.
            let b = poly.eval(i, &y);
            if b < T::zero() {
                let c = b / poly.norms_sq[i];
                for (v, &g) in y.iter_mut().zip(&poly.rows[i]) {
                    *v = *v - c * g;
                }
            }
        }
        if poly.is_feasible(&y) {
            x.copy_from_slice(&y);
            return true;
        }
    }
    false
}

/// One Euler step `x + delta dt + sqrt(dt) noise` followed by reflection
/// back into the domain (at most 100 K sweeps, then an exact projection).
pub fn rbm_step<T: Real>(
    poly: &Polyhedron<T>,
    state: &RbmState<T>,
    delta: &[T],
    dt: T,
    noise: &[T],
    scheme: ReflectionScheme,
) -> Result<RbmState<T>, RbmError> {
    let k = poly.dim();
    if delta.len() != k || noise.len() != k || state.point.len() != k {
        return Err(RbmError::LengthMismatch {
            expected: k,
            got: noise.len().min(delta.len()).min(state.point.len()),
        });
    }
    let sqrt_dt = dt.sqrt();
    let mut x: Vec<T> = (0..k)
        .map(|i| state.point[i] + delta[i] * dt + sqrt_dt * noise[i])
        .collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(RbmError::NonFinite);
    }
    let max_sweeps = 100 * k;
    let two = T::one() + T::one();
    let ok = match scheme {
        ReflectionScheme::Projection => restore(poly, &mut x, T::one(), max_sweeps),
        ReflectionScheme::Mirror => {
            restore(poly, &mut x, two, max_sweeps) || restore(poly, &mut x, T::one(), max_sweeps)
        }
    } || nearest_point(poly, &mut x);
    if !ok {
        return Err(RbmError::NoConvergence {
            sweeps: max_sweeps,
            point: x.iter().map(|v| v.as_f64()).collect(),
        });
    }
    Ok(RbmState {
        time: state.time + dt,
        point: x,
    })
}

/// Simulates one path from `start` to `horizon` and returns the terminal state.
pub fn run_rbm<T: Real, R: Rng + ?Sized>(
    poly: &Polyhedron<T>,
    delta: &[T],
    start: &[T],
    dt: T,
    horizon: T,
    scheme: ReflectionScheme,
    rng: &mut R,
) -> Result<RbmState<T>, RbmError> {
    let steps = (horizon / dt).as_f64().round() as u64;
    let mut state = RbmState {
        time: T::zero(),
        point: start.to_vec(),
    };
    let mut noise = vec![T::zero(); poly.dim()];
    for step in 1..=steps {
        for z in noise.iter_mut() {
            *z = T::standard_normal(rng);
        }
        state = rbm_step(poly, &state, delta, dt, &noise, scheme)?;
        state.time = T::from_f64_lossy(step as f64) * dt;
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmConfig {
    pub dt: f64,
    pub replicas: usize,
    /// Simulated time per replica; defaults to `5 max_i 1/(2 a_i^2)`.
    pub horizon: Option<f64>,
    pub scheme: ReflectionScheme,
    pub level: f64,
}

impl Default for RbmConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            replicas: 10_000,
            horizon: None,
            scheme: ReflectionScheme::Mirror,
            level: 0.01,
        }
    }
}

/// Burn-in before sampling: five times the slowest mixing scale.
pub fn burn_in(a: &[f64]) -> f64 {
    5.0 * a.iter().map(|x| 1.0 / (2.0 * x * x)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub index: usize,
    pub expected_rate: f64,
    pub fit: RateFit,
    pub ks: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmStationaryReport {
    pub a: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub scheme: ReflectionScheme,
    pub constraints: Vec<ConstraintReport>,
    pub independence: Option<IndependenceReport>,
}

impl RbmStationaryReport {
    pub fn pass(&self) -> bool {
        self.constraints.iter().all(|c| !c.ks.reject)
            && self
                .independence
                .as_ref()
                .is_none_or(IndependenceReport::pass)
    }
}

/// Drift decomposition, horizon and per-replica terminal `b(R)` values.
pub type TerminalSamples = (DriftDecomposition<f64>, f64, Vec<Vec<f64>>);

/// Terminal values of every `b_i(R)` for each replica, started from the
/// point where each `b_i` equals its stationary mean `1/(2 a_i)`.
pub fn rbm_terminal_samples(
    poly: &Polyhedron<f64>,
    delta: &[f64],
    cfg: &RbmConfig,
    master_seed: u64,
) -> Result<TerminalSamples, RbmError> {
    if !(cfg.dt > 0.0) || cfg.replicas == 0 {
        return Err(RbmError::InvalidConfig(
            "dt must be positive and replicas nonzero".into(),
        ));
    }
    let dec = decompose_drift(poly, delta)?;
    if let Some((index, &value)) = dec.a.iter().enumerate().find(|(_, a)| !(**a > 0.0)) {
        return Err(RbmError::NotErgodic { index, value });
    }
    let horizon = cfg.horizon.unwrap_or_else(|| burn_in(&dec.a));
    let means: Vec<f64> = dec.a.iter().map(|a| 0.5 / a).collect();
    let start = poly.point_with_values(&means)?;
    let samples = try_run_replicas(master_seed, cfg.replicas, |_, rng: &mut ReplicaRng| {
        let end = run_rbm(poly, delta, &start, cfg.dt, horizon, cfg.scheme, rng)?;
        Ok::<_, RbmError>(poly.eval_all(&end.point))
    })?;
    Ok((dec, horizon, samples))
}

/// Long-run ensemble check of the product-exponential stationary law.
pub fn rbm_stationary_check(
    poly: &Polyhedron<f64>,
    delta: &[f64],
    cfg: &RbmConfig,
    master_seed: u64,
) -> Result<RbmStationaryReport, RbmError> {
    let (dec, horizon, samples) = rbm_terminal_samples(poly, delta, cfg, master_seed)?;
    let k = poly.dim();
    let columns: Vec<Vec<f64>> = (0..k)
        .map(|i| samples.iter().map(|s| s[i]).collect())
        .collect();
    let mut constraints = Vec::with_capacity(k);
    for (i, col) in columns.iter().enumerate() {
        let rate = 2.0 * dec.a[i];
        // A terminal value can sit exactly on the face; the rate fit needs
        // strictly positive entries and loses nothing by skipping them.
        let positive: Vec<f64> = col.iter().copied().filter(|&x| x > 0.0).collect();
        constraints.push(ConstraintReport {
            index: i,
            expected_rate: rate,
            fit: fit_exponential_rate(&positive)?,
            ks: ks_one_sample(col, |x| 1.0 - (-rate * x.max(0.0)).exp(), cfg.level)?,
        });
    }
    let independence = if k > 1 {
        Some(independence_check(&columns)?)
    } else {
        None
    };
    Ok(RbmStationaryReport {
        a: dec.a,
        horizon,
        dt: cfg.dt,
        scheme: cfg.scheme,
        constraints,
        independence,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceProbe {
    pub times: Vec<f64>,
    /// Ensemble mean of each `b_i(R_t)` at each probe time.
    pub means: Vec<Vec<f64>>,
    /// Least-squares slope of each mean against time.
    pub growth_rates: Vec<f64>,
}

/// For drifts without a stationary law: reports how the mean of each
/// `b_i(R_t)` grows, without classifying the behaviour.
pub fn divergence_probe(
    poly: &Polyhedron<f64>,
    delta: &[f64],
    times: &[f64],
    dt: f64,
    replicas: usize,
    scheme: ReflectionScheme,
    master_seed: u64,
) -> Result<DivergenceProbe, RbmError> {
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(RbmError::InvalidConfig(
            "probe times must be increasing and nonnegative".into(),
        ));
    }
    let k = poly.dim();
    let start = vec![0.0; k];
    let paths = try_run_replicas(master_seed, replicas, |_, rng: &mut ReplicaRng| {
        let mut out = Vec::with_capacity(times.len());
        let mut state = RbmState {
            time: 0.0,
            point: start.clone(),
        };
        let mut prev = 0.0;
        for &t in times {
            state = run_rbm(poly, delta, &state.point, dt, t - prev, scheme, rng)?;
            prev = t;
            out.push(poly.eval_all(&state.point));
        }
        Ok::<_, RbmError>(out)
    })?;
    let means: Vec<Vec<f64>> = (0..times.len())
        .map(|ti| {
            (0..k)
                .map(|i| paths.iter().map(|p| p[ti][i]).sum::<f64>() / replicas as f64)
                .collect()
        })
        .collect();
    let mt = times.iter().sum::<f64>() / times.len() as f64;
    let sxx: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let growth_rates = (0..k)
        .map(|i| {
            let ys: Vec<f64> = means.iter().map(|m| m[i]).collect();
            let my = ys.iter().sum::<f64>() / ys.len() as f64;
            times
                .iter()
                .zip(&ys)
                .map(|(t, y)| (t - mt) * (y - my))
                .sum::<f64>()
                / sxx
        })
        .collect();
    Ok(DivergenceProbe {
        times: times.to_vec(),
        means,
        growth_rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_line_clamp() {
        let poly = Polyhedron::new(vec![vec![1.0]]).unwrap();
        let s = RbmState {
            time: 0.0,
            point: vec![0.0],
        };
        let next = rbm_step(
            &poly,
            &s,
            &[0.0],
            1.0,
            &[-0.7],
            ReflectionScheme::Projection,
        )
        .unwrap();
        assert_eq!(next.point, vec![0.0]);
        let next = rbm_step(&poly, &s, &[0.0], 1.0, &[-0.7], ReflectionScheme::Mirror).unwrap();
        assert_relative_eq!(next.point[0], 0.7, epsilon = 1e-15);
    }

    #[test]
    fn interior_step_is_plain_euler() {
        let poly = Polyhedron::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = RbmState {
            time: 0.0,
            point: vec![5.0, 5.0],
        };
        let next = rbm_step(
            &poly,
            &s,
            &[0.1, -0.1],
            0.01,
            &[0.2, 0.3],
            ReflectionScheme::Projection,
        )
        .unwrap();
        assert_relative_eq!(next.point[0], 5.0 + 0.001 + 0.02, epsilon = 1e-14);
        assert_relative_eq!(next.point[1], 5.0 - 0.001 + 0.03, epsilon = 1e-14);
    }

    #[test]
    fn wedge_decomposition_recovers_alphas() {
        let poly = Polyhedron::<f64>::atlas_wedge(4).unwrap();
        let drifts = DriftSpec::atlas(4, 1.0).unwrap();
        let dec = decompose_drift(&poly, &atlas_wedge_drift(&drifts, 1.0)).unwrap();
        for (x, y) in dec.a.iter().zip([0.75, 0.5, 0.25, 0.5]) {
            assert_relative_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_drift_decomposes_to_zero() {
        let poly = Polyhedron::<f64>::atlas_wedge(3).unwrap();
        assert_eq!(decompose_drift(&poly, &[0.0; 3]).unwrap().a, vec![0.0; 3]);
    }

    #[test]
    fn dependent_rows_rejected() {
        assert_eq!(
            Polyhedron::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(RbmError::RankDeficient { rank: 1, k: 2 })
        );
        assert_eq!(
            Polyhedron::<f64>::new(vec![vec![1.0, 2.0]]),
            Err(RbmError::NotSquare)
        );
    }

    #[test]
    fn refuses_non_ergodic_drift() {
        let poly = Polyhedron::new(vec![vec![1.0]]).unwrap();
        let cfg = RbmConfig {
            replicas: 10,
            ..RbmConfig::default()
        };
        assert!(matches!(
            rbm_stationary_check(&poly, &[0.5], &cfg, 1),
            Err(RbmError::NotErgodic { index: 0, .. })
        ));
    }

    #[test]
    fn point_with_values_inverts_eval() {
        let poly = Polyhedron::<f64>::atlas_wedge(3).unwrap();
        let x = poly.point_with_values(&[0.3, 0.7, 1.2]).unwrap();
        for (v, e) in poly.eval_all(&x).iter().zip([0.3, 0.7, 1.2]) {
            assert_relative_eq!(*v, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn burn_in_uses_slowest_constraint() {
        assert_relative_eq!(burn_in(&[1.0, 0.5]), 10.0);
    }
}
