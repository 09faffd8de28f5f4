use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::InfiniteError;

/// Initial configurations of the infinite systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialLaw {
    /// First particle at 0, spacings iid `Exp(2 delta)`.
    Mu { delta: f64 },
    /// First particle at 0; spacing `i` is `Exp(2 (1 - i/n))` for `i < n`
    /// and `Exp(2)` beyond, all independent.
    MuN { n: usize },
    /// A particle at 0 with rate-`rate` Poisson points on each side.
    PoissonTwoSided { rate: f64 },
}

impl InitialLaw {
    pub fn validate(&self) -> Result<(), InfiniteError> {
        match *self {
            InitialLaw::Mu { delta } if !(delta > 0.0) || !delta.is_finite() => Err(
                InfiniteError::InvalidParameter(format!("delta = {delta} must be positive")),
            ),
            InitialLaw::MuN { n } if n < 2 => Err(InfiniteError::InvalidParameter(format!(
                "mu_N needs N >= 2, got {n}"
            ))),
            InitialLaw::PoissonTwoSided { rate } if !(rate > 0.0) || !rate.is_finite() => Err(
                InfiniteError::InvalidParameter(format!("rate = {rate} must be positive")),
            ),
            _ => Ok(()),
        }
    }

    /// Rate of spacing `i` (1-based) for the one-sided laws.
    fn spacing_rate(&self, i: usize) -> f64 {
        match *self {
            InitialLaw::Mu { delta } => 2.0 * delta,
            InitialLaw::MuN { n } if i < n => 2.0 * (1.0 - i as f64 / n as f64),
            InitialLaw::MuN { .. } => 2.0,
            InitialLaw::PoissonTwoSided { rate } => rate,
        }
    }
}

fn positive_exp<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    loop {
        let y: f64 = rng.sample::<f64, _>(Exp1) / rate;
        if y > 0.0 {
            return y;
        }
    }
}

/// Strictly increasing positions drawn from `law`.
///
/// For the two-sided law `count` must be odd: `(count - 1) / 2` points on
/// each side, with the origin particle at the middle index.
pub fn sample_initial<R: Rng + ?Sized>(
    law: &InitialLaw,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>, InfiniteError> {
    law.validate()?;
    if count < 2 {
        return Err(InfiniteError::InvalidParameter(format!(
            "count = {count} must be at least 2"
        )));
    }
    match *law {
        InitialLaw::PoissonTwoSided { rate } => {
            if count.is_multiple_of(2) {
                return Err(InfiniteError::InvalidParameter(
                    "two-sided count must be odd".into(),
                ));
            }
            let m = count / 2;
            let mut out = vec![0.0; count];
            let mut acc = 0.0;
            for k in 1..=m {
                acc += positive_exp(rng, rate);
                out[m + k] = acc;
            }
            acc = 0.0;
            for k in 1..=m {
                acc += positive_exp(rng, rate);
                out[m - k] = -acc;
            }
            Ok(out)
        }
        _ => {
            let mut out = Vec::with_capacity(count);
            let mut acc = 0.0;
            out.push(acc);
            for i in 1..count {
                acc += positive_exp(rng, law.spacing_rate(i));
                out.push(acc);
            }
            Ok(out)
        }
    }
}

/// Heuristic growth diagnostics for a (truncated) initial configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// `min_{n >= 10} (x_n - x_1)^2 / n`.
    pub liminf_proxy: f64,
    /// `sum_i exp(-(x_i - x_1)^2 / 2T)` with a geometric tail estimate.
    pub summability_proxy: f64,
    /// Ratio of successive terms near the end of the sample.
    pub tail_ratio: f64,
    pub admissible: bool,
    /// Always true: the proxies are finite-sample heuristics, never proofs.
    pub heuristic: bool,
}

pub fn check_initial_admissibility(
    positions: &[f64],
    horizon: f64,
) -> Result<AdmissibilityReport, InfiniteError> {
    const N0: usize = 10;
    const TAIL: usize = 10;
    if positions.len() < 100 {
        return Err(InfiniteError::InvalidParameter(format!(
            "admissibility needs at least 100 positions, got {}",
            positions.len()
        )));
    }
    if !(horizon > 0.0) {
        return Err(InfiniteError::InvalidParameter(
            "horizon must be positive".into(),
        ));
    }
    let x1 = positions[0];
    let liminf_proxy = positions
        .iter()
        .enumerate()
        .skip(N0 - 1)
        .map(|(i, x)| (x - x1).powi(2) / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let terms: Vec<f64> = positions
        .iter()
        .map(|x| (-(x - x1).powi(2) / (2.0 * horizon)).exp())
        .collect();
    let partial: f64 = terms.iter().sum();
    let last = &terms[terms.len() - TAIL - 1..];
    let ratios: Vec<f64> = last
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let tail_ratio = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let converges = tail_ratio < 1.0 - 1e-9;
    let tail = if converges {
        terms[terms.len() - 1] * tail_ratio / (1.0 - tail_ratio)
    } else {
        f64::INFINITY
    };
    Ok(AdmissibilityReport {
        liminf_proxy,
        summability_proxy: partial + tail,
        tail_ratio,
        admissible: converges,
        heuristic: true,
    })
}
