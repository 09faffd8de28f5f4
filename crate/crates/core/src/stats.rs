//! Estimators and hypothesis tests shared by the experiments.
//!
//! Everything here is a pure function of its input samples and works in
//! `f64`; simulators convert at the boundary.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample entry {index} is not strictly positive and finite")]
    NonPositive { index: usize },
    #[error("sample entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("column {column} is constant")]
    ConstantColumn { column: usize },
    #[error("columns have unequal lengths")]
    RaggedColumns,
    #[error("level must lie in (0, 1), got {0}")]
    BadLevel(f64),
    #[error("grid must span a factor of at least 4 (got {0})")]
    NarrowGrid(f64),
    #[error("rates are neither all equal nor pairwise well separated")]
    NearlyEqualRates,
}

/// Outcome of a test; `reject` holds exactly when `statistic > critical_value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub level: f64,
    pub reject: bool,
    pub n: usize,
}

impl TestResult {
    pub fn new(statistic: f64, critical_value: f64, level: f64, n: usize) -> Self {
        Self {
            statistic,
            critical_value,
            level,
            reject: statistic > critical_value,
            n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    /// Delta-method standard error of the rate.
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n: usize,
}

impl RateFit {
    /// Whether `target` lies within `k` standard errors of the estimate.
    pub fn within_se(&self, target: f64, k: f64) -> bool {
        (self.rate - target).abs() <= k * self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn ci(&self, confidence: f64) -> (f64, f64) {
        let z = normal_quantile(0.5 + confidence / 2.0);
        (self.mean - z * self.se, self.mean + z * self.se)
    }

    pub fn within_se(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    /// Row-major m x m Pearson correlation matrix.
    pub correlations: Vec<Vec<f64>>,
    pub max_abs: f64,
    pub gate: f64,
    /// Index pairs (i < j) whose |correlation| exceeds the gate.
    pub flagged: Vec<(usize, usize)>,
    pub n: usize,
}

impl IndependenceReport {
    pub fn pass(&self) -> bool {
        self.flagged.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub confidence: f64,
    pub n: usize,
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn mean_estimate(xs: &[f64]) -> Result<MeanEstimate, StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    check_finite(xs)?;
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    Ok(MeanEstimate {
        mean,
        sd,
        se: sd / n.sqrt(),
        n: xs.len(),
    })
}

/// Sample variance with its large-sample standard error
/// `sqrt((m4 - s^4) / n)`.
pub fn variance_estimate(xs: &[f64]) -> Result<MeanEstimate, StatsError> {
    let m = mean_estimate(xs)?;
    let n = xs.len() as f64;
    let var = m.sd * m.sd;
    let m4 = xs.iter().map(|x| (x - m.mean).powi(4)).sum::<f64>() / n;
    Ok(MeanEstimate {
        mean: var,
        sd: (m4 - var * var).max(0.0).sqrt(),
        se: ((m4 - var * var).max(0.0) / n).sqrt(),
        n: xs.len(),
    })
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Maximum-likelihood rate `1 / mean` of an exponential sample.
pub fn fit_exponential_rate(xs: &[f64]) -> Result<RateFit, StatsError> {
    if xs.len() < 30 {
        return Err(StatsError::TooFewSamples {
            needed: 30,
            got: xs.len(),
        });
    }
    if let Some(index) = xs.iter().position(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(StatsError::NonPositive { index });
    }
    let m = mean_estimate(xs)?;
    let rate = 1.0 / m.mean;
    let z = normal_quantile(0.975);
    let lo_mean = m.mean + z * m.se;
    let hi_mean = m.mean - z * m.se;
    Ok(RateFit {
        rate,
        se: m.se / (m.mean * m.mean),
        ci_lo: 1.0 / lo_mean,
        ci_hi: if hi_mean > 0.0 {
            1.0 / hi_mean
        } else {
            f64::INFINITY
        },
        n: xs.len(),
    })
}

/// Survival function of the Kolmogorov distribution,
/// `P(K > x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        // The alternating series converges slowly here; the value is 1 to
        // double precision anyway.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value `K_level` with `P(K > K_level) = level`.
pub fn kolmogorov_critical(level: f64) -> Result<f64, StatsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::BadLevel(level));
    }
    let (mut lo, mut hi) = (0.2, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(StatsError::NonFinite { index }),
        None => Ok(()),
    }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Stephens' finite-sample scaling `sqrt(n) + 0.12 + 0.11/sqrt(n)` for the
/// asymptotic Kolmogorov law.
fn effective_root(n: f64) -> f64 {
    let r = n.sqrt();
    r + 0.12 + 0.11 / r
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(
    xs: &[f64],
    cdf: F,
    level: f64,
) -> Result<TestResult, StatsError> {
    if xs.len() < 30 {
        return Err(StatsError::TooFewSamples {
            needed: 30,
            got: xs.len(),
        });
    }
    check_finite(xs)?;
    let v = sorted(xs);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let crit = kolmogorov_critical(level)? / effective_root(n);
    Ok(TestResult::new(d, crit, level, v.len()))
}

pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<TestResult, StatsError> {
    let needed = 30;
    if a.len().min(b.len()) < needed {
        return Err(StatsError::TooFewSamples {
            needed,
            got: a.len().min(b.len()),
        });
    }
    check_finite(a)?;
    check_finite(b)?;
    let (sa, sb) = (sorted(a), sorted(b));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let crit = kolmogorov_critical(level)? / effective_root(na * nb / (na + nb));
    Ok(TestResult::new(d, crit, level, sa.len() + sb.len()))
}

/// Pairwise Pearson correlations of the columns, each gated at `3/sqrt(n)`.
pub fn independence_check(columns: &[Vec<f64>]) -> Result<IndependenceReport, StatsError> {
    let n = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != n) {
        return Err(StatsError::RaggedColumns);
    }
    if n < 100 {
        return Err(StatsError::TooFewSamples {
            needed: 100,
            got: n,
        });
    }
    for (column, c) in columns.iter().enumerate() {
        check_finite(c)?;
        if c.iter().all(|&x| x == c[0]) {
            return Err(StatsError::ConstantColumn { column });
        }
    }
    let m = columns.len();
    let gate = 3.0 / (n as f64).sqrt();
    let mut correlations = vec![vec![1.0; m]; m];
    let mut flagged = Vec::new();
    let mut max_abs: f64 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let r = pearson(&columns[i], &columns[j]);
            correlations[i][j] = r;
            correlations[j][i] = r;
            max_abs = max_abs.max(r.abs());
            if r.abs() > gate {
                flagged.push((i, j));
            }
        }
    }
    Ok(IndependenceReport {
        correlations,
        max_abs,
        gate,
        flagged,
        n,
    })
}

/// Ordinary least squares of `ys` on `xs` with a Student-t interval for the
/// slope.
pub fn linear_fit(xs: &[f64], ys: &[f64], confidence: f64) -> Result<LinearFit, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::RaggedColumns);
    }
    if xs.len() < 3 {
        return Err(StatsError::TooFewSamples {
            needed: 3,
            got: xs.len(),
        });
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::BadLevel(confidence));
    }
    check_finite(xs)?;
    check_finite(ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let df = n - 2.0;
    let slope_se = (rss / df / sxx).sqrt();
    let tq = StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + confidence / 2.0);
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
        ci_lo: slope - tq * slope_se,
        ci_hi: slope + tq * slope_se,
        confidence,
        n: xs.len(),
    })
}

/// Slope of `log sd` against `log t` with a 95% interval.
pub fn scaling_exponent_fit(ts: &[f64], sds: &[f64]) -> Result<LinearFit, StatsError> {
    if let Some(index) = ts
        .iter()
        .chain(sds)
        .position(|x| !(*x > 0.0) || !x.is_finite())
    {
        return Err(StatsError::NonPositive { index });
    }
    if ts.len() >= 3 {
        let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().copied().fold(0.0, f64::max);
        if hi / lo < 4.0 {
            return Err(StatsError::NarrowGrid(hi / lo));
        }
    }
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ls: Vec<f64> = sds.iter().map(|s| s.ln()).collect();
    linear_fit(&lt, &ls, 0.95)
}

/// CDF of a sum of independent exponentials with the given rates.
///
/// Equal rates give the Erlang law; pairwise distinct rates use the
/// partial-fraction form. Clusters of nearly equal but unequal rates are
/// rejected because the partial-fraction form is unstable there.
pub fn hypoexponential_cdf(rates: &[f64], x: f64) -> Result<f64, StatsError> {
    if let Some(index) = rates.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(StatsError::NonPositive { index });
    }
    if rates.is_empty() {
        return Ok(if x >= 0.0 { 1.0 } else { 0.0 });
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let r0 = rates[0];
    if rates.iter().all(|r| ((r - r0) / r0).abs() < 1e-12) {
        let g = Gamma::new(rates.len() as f64, r0).expect("valid gamma");
        return Ok(g.cdf(x));
    }
    for (i, a) in rates.iter().enumerate() {
        for b in &rates[i + 1..] {
            if ((a - b) / a.max(*b)).abs() < 1e-3 {
                return Err(StatsError::NearlyEqualRates);
            }
        }
    }
    let survival: f64 = rates
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            let coeff: f64 = rates
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &lj)| lj / (lj - li))
                .product();
            coeff * (-li * x).exp()
        })
        .sum();
    Ok((1.0 - survival).clamp(0.0, 1.0))
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
