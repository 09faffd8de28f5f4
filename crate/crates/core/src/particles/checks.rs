use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use super::trajectory::{run_ensemble, StepConfig};
use super::ParticleError;
use crate::model::DriftSpec;
use crate::rng::derive_seed;
use crate::scalar::Real;
use crate::stats::{
    self, ks_two_sample, linear_fit, mean_estimate, pearson, variance_estimate, LinearFit,
    MeanEstimate, TestResult,
};

/// Occupation-time estimate of the local time at one rank boundary, as a
/// nondecreasing step function on the recorded sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeEstimate {
    pub eps: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// False when samples are sparser than `eps^2` in time, in which case
    /// the band is not resolved and the estimate is unreliable.
    pub dense_enough: bool,
}

impl LocalTimeEstimate {
    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("at least the initial sample")
    }
}

/// `(1 / 2 eps) * Leb{s <= t : spacing_j(s) / sqrt 2 <= eps}` by left-point
/// quadrature over the recorded samples. `j` is the 1-based lower rank.
pub fn local_time_estimate<T: Real>(
    traj: &Trajectory<T>,
    j: usize,
    eps: f64,
) -> Result<LocalTimeEstimate, ParticleError> {
    if !(eps > 0.0) {
        return Err(ParticleError::InvalidConfig("eps must be positive".into()));
    }
    let n = traj.particles();
    if j == 0 || j >= n {
        return Err(ParticleError::RankOutOfRange {
            rank: j,
            particles: n,
        });
    }
    let band = eps * std::f64::consts::SQRT_2;
    let mut times = Vec::with_capacity(traj.samples.len());
    let mut values = Vec::with_capacity(traj.samples.len());
    let mut occupied = 0.0;
    let mut widest: f64 = 0.0;
    times.push(traj.samples[0].time.as_f64());
    values.push(0.0);
    for w in traj.samples.windows(2) {
        let (a, b) = (w[0].time.as_f64(), w[1].time.as_f64());
        widest = widest.max(b - a);
        if w[0].spacings[j - 1].as_f64() <= band {
            occupied += b - a;
        }
        times.push(b);
        values.push(occupied / (2.0 * eps));
    }
    Ok(LocalTimeEstimate {
        eps,
        times,
        values,
        dense_enough: widest <= eps * eps * (1.0 + 1e-9),
    })
}

/// Same estimator at the terminal time, read from the per-step counters
/// kept during simulation (every step, independent of `record_every`).
pub fn local_time_from_counters<T: Real>(traj: &Trajectory<T>, j: usize) -> Option<f64> {
    let d = &traj.diagnostics;
    let eps = d.local_time_eps?.as_f64();
    let count = *d.local_time_counts.get(j.checked_sub(1)?)?;
    Some(count as f64 * d.dt.as_f64() / (2.0 * eps))
}

/// `log exp(sum_j delta_j beta_j(t) - 1/2 sum_j delta_j^2 t)` for a driftless
/// trajectory.
pub fn girsanov_log_weight<T: Real>(
    traj: &Trajectory<T>,
    target: &DriftSpec<T>,
) -> Result<T, ParticleError> {
    if traj.drifts.iter().any(|d| *d != T::zero()) {
        return Err(ParticleError::DriftedReference);
    }
    if target.len() != traj.particles() {
        return Err(ParticleError::LengthMismatch {
            expected: traj.particles(),
            got: target.len(),
        });
    }
    let t = traj.final_time();
    let half = T::from_f64_lossy(0.5);
    let exponent = target
        .as_slice()
        .iter()
        .zip(&traj.diagnostics.beta)
        .fold(T::zero(), |acc, (&d, &b)| acc + d * b - half * d * d * t);
    Ok(exponent)
}

pub fn girsanov_reweight<T: Real>(
    traj: &Trajectory<T>,
    target: &DriftSpec<T>,
) -> Result<T, ParticleError> {
    girsanov_log_weight(traj, target).map(T::exp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterOfMassReport {
    pub horizon: f64,
    pub mean: MeanEstimate,
    pub expected_mean: f64,
    pub mean_ok: bool,
    pub variance: MeanEstimate,
    pub expected_variance: f64,
    pub variance_ok: bool,
    /// Correlation of the center-of-mass shift with each terminal spacing.
    pub spacing_correlations: Vec<f64>,
    pub correlation_gate: f64,
    pub correlations_ok: bool,
}

impl CenterOfMassReport {
    pub fn pass(&self) -> bool {
        self.mean_ok && self.variance_ok && self.correlations_ok
    }
}

fn common_horizon<T: Real>(
    ensemble: &[Trajectory<T>],
    needed: usize,
) -> Result<f64, ParticleError> {
    if ensemble.len() < needed {
        return Err(ParticleError::TooFewReplicas {
            needed,
            got: ensemble.len(),
        });
    }
    let t = ensemble[0].final_time().as_f64();
    if ensemble
        .iter()
        .any(|tr| (tr.final_time().as_f64() - t).abs() > 1e-9 * t.max(1.0))
    {
        return Err(ParticleError::InvalidConfig(
            "replicas must share a horizon".into(),
        ));
    }
    Ok(t)
}

/// Checks that the center of mass moves as a Brownian motion with drift
/// `mean(drifts)` and variance `t / N`, uncorrelated with the spacings.
pub fn center_of_mass_checks<T: Real>(
    ensemble: &[Trajectory<T>],
    drifts: &DriftSpec<T>,
) -> Result<CenterOfMassReport, ParticleError> {
    let t = common_horizon(ensemble, 500)?;
    let n = drifts.len() as f64;
    let shifts: Vec<f64> = ensemble.iter().map(|tr| tr.com_shift().as_f64()).collect();
    let mean = mean_estimate(&shifts)?;
    let variance = variance_estimate(&shifts)?;
    let expected_mean = drifts.mean().as_f64() * t;
    let expected_variance = t / n;
    let gate = 3.0 / (ensemble.len() as f64).sqrt();
    let m = ensemble[0].terminal().spacings.len();
    let spacing_correlations: Vec<f64> = (0..m)
        .map(|j| {
            let col: Vec<f64> = ensemble
                .iter()
                .map(|tr| tr.terminal().spacings[j].as_f64())
                .collect();
            pearson(&shifts, &col)
        })
        .collect();
    Ok(CenterOfMassReport {
        horizon: t,
        mean_ok: mean.within_se(expected_mean, 3.0),
        mean,
        expected_mean,
        variance_ok: variance.within_se(expected_variance, 3.0),
        variance,
        expected_variance,
        correlations_ok: spacing_correlations.iter().all(|r| r.abs() < gate),
        spacing_correlations,
        correlation_gate: gate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMartingaleReport {
    pub horizon: f64,
    pub means: Vec<MeanEstimate>,
    pub expected_means: Vec<f64>,
    pub variances: Vec<MeanEstimate>,
    pub correlations: Vec<Vec<f64>>,
    pub correlation_gate: f64,
    pub means_ok: bool,
    pub variances_ok: bool,
    pub correlations_ok: bool,
}

impl RankMartingaleReport {
    pub fn pass(&self) -> bool {
        self.means_ok && self.variances_ok && self.correlations_ok
    }
}

/// Checks that each `beta_j(t)` has mean `delta_j t`, variance `t`, and that
/// distinct ranks are uncorrelated.
pub fn rank_martingale_checks<T: Real>(
    ensemble: &[Trajectory<T>],
    drifts: &DriftSpec<T>,
) -> Result<RankMartingaleReport, ParticleError> {
    let t = common_horizon(ensemble, 100)?;
    let n = drifts.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            ensemble
                .iter()
                .map(|tr| tr.diagnostics.beta[j].as_f64())
                .collect()
        })
        .collect();
    let means = cols
        .iter()
        .map(|c| mean_estimate(c))
        .collect::<Result<Vec<_>, _>>()?;
    let variances = cols
        .iter()
        .map(|c| variance_estimate(c))
        .collect::<Result<Vec<_>, _>>()?;
    let expected_means: Vec<f64> = drifts.as_slice().iter().map(|d| d.as_f64() * t).collect();
    let gate = 3.0 / (ensemble.len() as f64).sqrt();
    let mut correlations = vec![vec![1.0; n]; n];
    let mut correlations_ok = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = pearson(&cols[i], &cols[j]);
            correlations[i][j] = r;
            correlations[j][i] = r;
            correlations_ok &= r.abs() < gate;
        }
    }
    Ok(RankMartingaleReport {
        horizon: t,
        means_ok: means
            .iter()
            .zip(&expected_means)
            .all(|(m, e)| m.within_se(*e, 3.0)),
        variances_ok: variances.iter().all(|v| v.within_se(t, 3.0)),
        means,
        expected_means,
        variances,
        correlations,
        correlation_gate: gate,
        correlations_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionTest {
    /// 0-based spacing index read at the earlier time.
    pub a: usize,
    /// 0-based spacing index read at the later time.
    pub b: usize,
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversalReport {
    pub level: f64,
    pub per_test_level: f64,
    pub tests: Vec<ProjectionTest>,
}

impl ReversalReport {
    pub fn reject(&self) -> bool {
        self.tests.iter().any(|t| t.result.reject)
    }
}

/// Pair-symmetry test of `(D(0), D(tau))` against `(D(tau), D(0))`.
///
/// The replicas are split into two halves so that the paired and swapped
/// samples are independent. For each pair of spacing indices `(a, b)` the
/// projections `D_a(0) - D_b(tau)` (first half) and `D_a(tau) - D_b(0)`
/// (second half) are compared by a two-sample KS test; the overall level is
/// kept by a Bonferroni split across the `(N-1)^2` projections.
pub fn time_reversal_test(
    earlier: &[Vec<f64>],
    later: &[Vec<f64>],
    level: f64,
) -> Result<ReversalReport, ParticleError> {
    if earlier.len() != later.len() {
        return Err(ParticleError::LengthMismatch {
            expected: earlier.len(),
            got: later.len(),
        });
    }
    let half = earlier.len() / 2;
    let m = earlier.first().map_or(0, Vec::len);
    let per_test_level = level / (m * m).max(1) as f64;
    let mut tests = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            let paired: Vec<f64> = (0..half).map(|r| earlier[r][a] - later[r][b]).collect();
            let swapped: Vec<f64> = (half..2 * half)
                .map(|r| later[r][a] - earlier[r][b])
                .collect();
            let result = ks_two_sample(&paired, &swapped, per_test_level)?;
            tests.push(ProjectionTest { a, b, result });
        }
    }
    Ok(ReversalReport {
        level,
        per_test_level,
        tests,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingGrowthReport {
    pub times: Vec<f64>,
    /// `mean_spacings[i][j]`: mean of spacing `j` at `times[i]`.
    pub mean_spacings: Vec<Vec<MeanEstimate>>,
    /// Per spacing, the regression of the spacing on time over all replicas.
    pub fits: Vec<LinearFit>,
    /// Spacings whose slope interval lies strictly above zero.
    pub growing: Vec<usize>,
}

/// Growth of the spacings of a (typically non-tight) system started with all
/// particles at the origin. Each probe time uses an independent ensemble, so
/// the pooled regression of spacing on time has independent residuals.
pub fn spacing_growth_probe(
    drifts: &DriftSpec<f64>,
    times: &[f64],
    dt: f64,
    replicas: usize,
    confidence: f64,
    master_seed: u64,
) -> Result<SpacingGrowthReport, ParticleError> {
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || !(times[0] > 0.0) {
        return Err(ParticleError::InvalidConfig(
            "probe times must be positive and increasing".into(),
        ));
    }
    let n = drifts.len();
    let m = n.saturating_sub(1);
    let mut xs = Vec::with_capacity(times.len() * replicas);
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len() * replicas); m];
    let mut mean_spacings = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let steps = (t / dt).round().max(1.0);
        let cfg = StepConfig::new(t / steps, t)
            .endpoints_only()
            .without_occupation();
        let seed = derive_seed(master_seed, &format!("growth-{i}"));
        let ens = run_ensemble(seed, replicas, drifts, &cfg, |_| vec![0.0; n])?;
        let mut means = Vec::with_capacity(m);
        for (j, col) in cols.iter_mut().enumerate() {
            let s = ens.terminal_spacing(j);
            means.push(mean_estimate(&s)?);
            col.extend_from_slice(&s);
        }
        xs.extend(std::iter::repeat_n(t, replicas));
        mean_spacings.push(means);
    }
    let fits = cols
        .iter()
        .map(|c| linear_fit(&xs, c, confidence))
        .collect::<Result<Vec<_>, _>>()?;
    let growing = fits
        .iter()
        .enumerate()
        .filter(|(_, f)| f.ci_lo > 0.0)
        .map(|(j, _)| j)
        .collect();
    Ok(SpacingGrowthReport {
        times: times.to_vec(),
        mean_spacings,
        fits,
        growing,
    })
}

impl From<stats::StatsError> for ParticleError {
    fn from(e: stats::StatsError) -> Self {
        ParticleError::Stats(e)
    }
}
