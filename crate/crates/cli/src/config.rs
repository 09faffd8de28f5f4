//! Experiment configuration: one TOML file with a master seed, an output
//! directory and one optional table per command. Unknown keys are errors.

use std::path::{Path, PathBuf};

use atlas_core::rbm::ReflectionScheme;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub stationary_finite: FiniteConfig,
    pub stationary_infinite: InfiniteSection,
    pub harris: HarrisSection,
    pub conjecture_k: ConjectureSection,
    pub rbm_check: RbmSection,
    pub bounds_table: BoundsSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            output_dir: PathBuf::from("atlas-out"),
            stationary_finite: FiniteConfig::default(),
            stationary_infinite: InfiniteSection::default(),
            harris: HarrisSection::default(),
            conjecture_k: ConjectureSection::default(),
            rbm_check: RbmSection::default(),
            bounds_table: BoundsSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// Exact draw from the centered stationary law.
    Stationary,
    /// All particles at the origin.
    Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiniteConfig {
    /// Drift per rank, lowest rank first.
    pub drifts: Option<Vec<f64>>,
    /// Alternatively, target alphas (N-1 entries) and the mean drift.
    pub alphas: Option<Vec<f64>>,
    pub mean_drift: f64,
    pub dt: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub start: Start,
    pub level: f64,
    /// Lag of the pair-symmetry (time-reversal) test.
    pub reversal_lag: f64,
    /// Probe times for `--expect-divergence`.
    pub divergence_times: Vec<f64>,
}

impl Default for FiniteConfig {
    fn default() -> Self {
        Self {
            drifts: None,
            alphas: None,
            mean_drift: 0.0,
            dt: 1e-3,
            horizon: 20.0,
            replicas: 2000,
            start: Start::Stationary,
            level: 0.01,
            reversal_lag: 0.5,
            divergence_times: vec![5.0, 10.0, 20.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfiniteSection {
    pub delta: f64,
    pub k: usize,
    pub t: f64,
    pub epsilon: f64,
    pub n_cap: usize,
    pub dt: f64,
    pub replicas: usize,
    pub level: f64,
}

impl Default for InfiniteSection {
    fn default() -> Self {
        Self {
            delta: 1.0,
            k: 3,
            t: 1.0,
            epsilon: 1e-3,
            n_cap: atlas_core::infinite::DEFAULT_N_CAP,
            dt: 1e-3,
            replicas: 2000,
            level: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarrisSection {
    pub lambda: f64,
    pub t_grid: Vec<f64>,
    pub replicas: usize,
    pub tol: f64,
    pub per_side: Option<usize>,
    pub slope_target: f64,
    pub slope_tolerance: f64,
    /// Allowed relative error of `Var / sqrt(t)` against `sqrt(2/pi)` at the
    /// largest grid time.
    pub variance_tolerance: f64,
}

impl Default for HarrisSection {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            t_grid: vec![4.0, 8.0, 16.0, 32.0],
            replicas: 2000,
            tol: 1e-3,
            per_side: None,
            slope_target: 0.25,
            slope_tolerance: 0.05,
            variance_tolerance: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConjectureSection {
    pub delta: f64,
    pub k_list: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub dt: f64,
    pub replicas: usize,
    pub tol: f64,
    pub particles: Option<usize>,
}

impl Default for ConjectureSection {
    fn default() -> Self {
        Self {
            delta: 1.0,
            k_list: vec![1, 2, 4, 8],
            t_grid: vec![1.0, 2.0, 4.0],
            dt: 1e-2,
            replicas: 200,
            tol: 1e-3,
            particles: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RbmSection {
    /// Constraint rows; when absent the Atlas wedge for `drifts` is used.
    pub rows: Option<Vec<Vec<f64>>>,
    /// Drift vector of the RBM (required with `rows`).
    pub delta: Option<Vec<f64>>,
    /// Rank drifts of the particle system behind the Atlas wedge.
    pub drifts: Vec<f64>,
    pub theta: f64,
    pub dt: f64,
    pub replicas: usize,
    pub horizon: Option<f64>,
    pub scheme: ReflectionScheme,
    pub level: f64,
    pub divergence_times: Vec<f64>,
}

impl Default for RbmSection {
    fn default() -> Self {
        Self {
            rows: None,
            delta: None,
            drifts: vec![1.0, 0.0, 0.0],
            theta: 1.0,
            dt: 1e-3,
            replicas: 10_000,
            horizon: None,
            scheme: ReflectionScheme::Mirror,
            level: 0.01,
            divergence_times: vec![1.0, 2.0, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KeGrid {
    pub k: Vec<usize>,
    pub j: Vec<usize>,
    pub n: Vec<usize>,
    pub t: Vec<f64>,
}

impl Default for KeGrid {
    fn default() -> Self {
        Self {
            k: vec![2, 4],
            j: Vec::new(),
            n: vec![32, 64, 128],
            t: vec![1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TvGrid {
    pub j: Vec<usize>,
    pub n: Vec<usize>,
}

impl Default for TvGrid {
    fn default() -> Self {
        Self {
            j: vec![1, 3, 10],
            n: vec![100, 1000, 10_000],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammasqGrid {
    pub r: Vec<f64>,
    pub lambda: Vec<f64>,
    pub t: Vec<f64>,
}

impl Default for GammasqGrid {
    fn default() -> Self {
        Self {
            r: vec![1.0, 2.0, 5.0],
            lambda: vec![2.0],
            t: vec![0.125, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub ke1: Option<KeGrid>,
    pub ke2: Option<KeGrid>,
    pub ke3: Option<KeGrid>,
    pub tv: Option<TvGrid>,
    pub gammasq: Option<GammasqGrid>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            ke1: None,
            ke2: Some(KeGrid::default()),
            ke3: None,
            tv: Some(TvGrid::default()),
            gammasq: Some(GammasqGrid::default()),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

fn require(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.to_string()))
    }
}

fn level_ok(level: f64) -> bool {
    level > 0.0 && level < 1.0
}

fn increasing(xs: &[f64]) -> bool {
    !xs.is_empty() && xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[1] > w[0])
}

impl FiniteConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(
            self.dt > 0.0 && self.dt <= 0.1,
            "stationary_finite.dt must lie in (0, 0.1]",
        )?;
        require(
            self.horizon > 0.0 && self.horizon.is_finite(),
            "stationary_finite.horizon must be positive",
        )?;
        require(
            self.replicas >= 100,
            "stationary_finite.replicas must be at least 100",
        )?;
        require(
            level_ok(self.level),
            "stationary_finite.level must lie in (0, 1)",
        )?;
        require(
            self.reversal_lag > 0.0 && self.reversal_lag <= self.horizon,
            "stationary_finite.reversal_lag must lie in (0, horizon]",
        )?;
        require(
            increasing(&self.divergence_times)
                && self.divergence_times[0] > 0.0
                && self.divergence_times.len() >= 2,
            "stationary_finite.divergence_times must be at least two positive increasing times",
        )?;
        require(
            !(self.drifts.is_some() && self.alphas.is_some()),
            "stationary_finite: give either drifts or alphas, not both",
        )?;
        require(
            self.mean_drift.is_finite(),
            "stationary_finite.mean_drift must be finite",
        )
    }
}

impl InfiniteSection {
    pub fn validate(&self) -> Result<(), CliError> {
        require(
            self.delta > 0.0 && self.delta.is_finite(),
            "stationary_infinite.delta must be positive",
        )?;
        require(self.k >= 1, "stationary_infinite.k must be at least 1")?;
        require(
            self.t >= 0.0 && self.t.is_finite(),
            "stationary_infinite.t must be nonnegative",
        )?;
        require(
            self.epsilon > 0.0 && self.epsilon < 1.0,
            "stationary_infinite.epsilon must lie in (0, 1)",
        )?;
        require(
            self.n_cap > self.k + 1,
            "stationary_infinite.n_cap must exceed k + 1",
        )?;
        require(
            self.dt > 0.0 && self.dt <= 0.1,
            "stationary_infinite.dt must lie in (0, 0.1]",
        )?;
        require(
            self.replicas >= 100,
            "stationary_infinite.replicas must be at least 100",
        )?;
        require(
            level_ok(self.level),
            "stationary_infinite.level must lie in (0, 1)",
        )
    }
}

impl HarrisSection {
    pub fn validate(&self) -> Result<(), CliError> {
        require(
            self.lambda > 0.0 && self.lambda.is_finite(),
            "harris.lambda must be positive",
        )?;
        require(
            increasing(&self.t_grid) && self.t_grid[0] > 0.0,
            "harris.t_grid must be positive and increasing",
        )?;
        require(self.replicas >= 30, "harris.replicas must be at least 30")?;
        require(
            self.tol > 0.0 && self.tol < 1.0,
            "harris.tol must lie in (0, 1)",
        )?;
        require(
            self.per_side.is_none_or(|m| m >= 1),
            "harris.per_side must be at least 1",
        )?;
        require(
            self.slope_tolerance > 0.0 && self.variance_tolerance > 0.0,
            "harris tolerances must be positive",
        )
    }
}

impl ConjectureSection {
    pub fn validate(&self) -> Result<(), CliError> {
        require(
            self.delta > 0.0 && self.delta.is_finite(),
            "conjecture_k.delta must be positive",
        )?;
        require(
            !self.k_list.is_empty() && self.k_list.iter().all(|&k| k >= 1),
            "conjecture_k.k_list must hold ranks >= 1",
        )?;
        require(
            increasing(&self.t_grid) && self.t_grid[0] > 0.0,
            "conjecture_k.t_grid must be positive and increasing",
        )?;
        require(
            self.dt > 0.0 && self.dt <= 0.1,
            "conjecture_k.dt must lie in (0, 0.1]",
        )?;
        require(
            self.replicas >= 2,
            "conjecture_k.replicas must be at least 2",
        )?;
        require(
            self.tol > 0.0 && self.tol < 1.0,
            "conjecture_k.tol must lie in (0, 1)",
        )
    }
}

impl RbmSection {
    pub fn validate(&self) -> Result<(), CliError> {
        require(
            self.rows.is_some() == self.delta.is_some(),
            "rbm_check: rows and delta must be given together",
        )?;
        if self.rows.is_none() {
            require(
                self.drifts.len() >= 2,
                "rbm_check.drifts needs at least two entries",
            )?;
        }
        require(
            self.theta > 0.0 && self.theta.is_finite(),
            "rbm_check.theta must be positive",
        )?;
        require(
            self.dt > 0.0 && self.dt <= 0.1,
            "rbm_check.dt must lie in (0, 0.1]",
        )?;
        require(
            self.replicas >= 100,
            "rbm_check.replicas must be at least 100",
        )?;
        require(
            self.horizon.is_none_or(|h| h > 0.0 && h.is_finite()),
            "rbm_check.horizon must be positive",
        )?;
        require(level_ok(self.level), "rbm_check.level must lie in (0, 1)")?;
        require(
            increasing(&self.divergence_times)
                && self.divergence_times[0] >= 0.0
                && self.divergence_times.len() >= 2,
            "rbm_check.divergence_times must be at least two increasing times",
        )
    }
}

impl BoundsSection {
    pub fn validate(&self) -> Result<(), CliError> {
        let ke = [&self.ke1, &self.ke2, &self.ke3];
        for g in ke.into_iter().flatten() {
            require(
                g.t.iter().all(|t| *t >= 0.0 && t.is_finite()),
                "bounds_table: t must be nonnegative",
            )?;
        }
        if let Some(g) = &self.ke3 {
            require(!g.j.is_empty(), "bounds_table.ke3.j must not be empty")?;
        }
        if let Some(g) = &self.gammasq {
            require(
                g.t.iter()
                    .chain(&g.lambda)
                    .chain(&g.r)
                    .all(|x| x.is_finite()),
                "bounds_table.gammasq entries must be finite",
            )?;
        }
        Ok(())
    }
}
