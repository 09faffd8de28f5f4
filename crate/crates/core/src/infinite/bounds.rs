//! Explicit probability and total-variation bounds for truncating the
//! infinite Atlas model, evaluated in log space.
//!
//! The Stirling constant is fixed by `Gamma(z) >= sqrt(2 pi) z^(z - 1/2) e^(-z)`,
//! i.e. `C = 1/sqrt(2 pi)`. Then `C1 = 2 C sqrt(pi) e^(1/2) = sqrt(2) e^(1/2)`,
//! and bounding `binom(N-1, k-1) <= (N-1)^(k-1) / (k-1)!` in the rank-k chain
//! gives `C2(k) = 2 C k sqrt(pi) e^(1/2) / (k-1)! = C1 k / (k-1)!`.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::InfiniteError;

pub const STIRLING_C: f64 = 0.398_942_280_401_432_7;

pub fn c1() -> f64 {
    2.0 * STIRLING_C * PI.sqrt() * E.sqrt()
}

pub fn c2(k: usize) -> f64 {
    (c1().ln() + (k as f64).ln() - ln_gamma(k as f64)).exp()
}

/// Evaluated bound with the inputs, precondition status and the constants
/// substituted. `value` is present only when the precondition holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub value: Option<f64>,
    pub precondition_ok: bool,
    pub constants_used: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(
        name: &str,
        inputs: &[(&str, f64)],
        value: Option<f64>,
        constants: &[(&str, f64)],
    ) -> Self {
        let to_map = |xs: &[(&str, f64)]| xs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self {
            name: name.to_string(),
            inputs: to_map(inputs),
            precondition_ok: value.is_some(),
            value,
            constants_used: to_map(constants),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KeyEstimate {
    /// Lowest rank of the first `n` indices is the global lowest.
    Ke1 { n: usize },
    /// Lowest `k` ranks of the first `n` indices are the global lowest `k`.
    Ke2 { k: usize, n: usize },
    /// Under `mu_N`, the lowest `k` of the first `n` are those of the first `j`.
    Ke3 { k: usize, j: usize, n: usize },
}

impl KeyEstimate {
    pub fn name(&self) -> &'static str {
        match self {
            KeyEstimate::Ke1 { .. } => "KE1",
            KeyEstimate::Ke2 { .. } => "KE2",
            KeyEstimate::Ke3 { .. } => "KE3",
        }
    }
}

/// `ln(a) * m` with the convention `0 * ln 0 = 0`.
fn pow_ln(ln_base: f64, m: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        ln_base * m
    }
}

/// Bound on the probability of the complement of the rank-agreement event
/// over `[0, t]`.
pub fn key_estimate_bound(variant: KeyEstimate, t: f64) -> BoundReport {
    let x = 16.0 * E * t;
    let ln_r = |m: f64| 0.5 * (4.0 * E * t / m).ln();
    match variant {
        KeyEstimate::Ke1 { n } => {
            let nf = n as f64;
            let ok = t >= 0.0 && n >= 1 && nf + 1.0 >= x;
            let value = ok.then(|| (c1().ln() + 2.0 * t + pow_ln(ln_r(nf + 1.0), nf)).exp());
            BoundReport::new(
                "KE1",
                &[("n", nf), ("t", t)],
                value,
                &[("C", STIRLING_C), ("C1", c1())],
            )
        }
        KeyEstimate::Ke2 { k, n } => {
            let (kf, nf) = (k as f64, n as f64);
            let ok = t >= 0.0 && k >= 1 && k < n && nf - kf + 2.0 >= x;
            let value = ok.then(|| {
                (c2(k).ln()
                    + 2.0 * t
                    + pow_ln((nf - 1.0).ln(), kf - 1.0)
                    + pow_ln(ln_r(nf - kf + 2.0), nf - kf + 1.0))
                .exp()
            });
            BoundReport::new(
                "KE2",
                &[("k", kf), ("n", nf), ("t", t)],
                value,
                &[("C", STIRLING_C), ("C1", c1()), ("C2(k)", c2(k.max(1)))],
            )
        }
        KeyEstimate::Ke3 { k, j, n } => {
            let (kf, jf, nf) = (k as f64, j as f64, n as f64);
            let ok = t >= 0.0 && k >= 1 && k < j && j < n && jf - kf + 2.0 >= x;
            let value = ok.then(|| {
                let lr = ln_r(jf - kf + 2.0);
                let tail = 1.0 - pow_ln(lr, nf - jf).exp();
                (c2(k).ln()
                    + 2.0 * t
                    + pow_ln((jf - 1.0).ln(), kf - 1.0)
                    + pow_ln(lr, jf - kf + 1.0))
                .exp()
                    * tail
            });
            BoundReport::new(
                "KE3",
                &[("j", jf), ("k", kf), ("n", nf), ("t", t)],
                value,
                &[("C", STIRLING_C), ("C1", c1()), ("C2(k)", c2(k.max(1)))],
            )
        }
    }
}

/// `sqrt(pi) (lambda^2 t / 2)^(r/2) e^(t lambda^2 / 2) / Gamma((r+1)/2)`,
/// an upper bound on `E exp(-Y^2 / 2t)` for `Y ~ Gamma(r, lambda)`.
pub fn gammasq_bound(r: f64, lambda: f64, t: f64) -> Result<f64, InfiniteError> {
    Ok(ln_gammasq_bound(r, lambda, t)?.exp())
}

pub fn ln_gammasq_bound(r: f64, lambda: f64, t: f64) -> Result<f64, InfiniteError> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(InfiniteError::InvalidParameter(format!(
            "shape r = {r} must be at least 1"
        )));
    }
    if !(lambda > 0.0) || !(t >= 0.0) {
        return Err(InfiniteError::InvalidParameter(
            "need lambda > 0 and t >= 0".into(),
        ));
    }
    if t == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let a = lambda * lambda * t / 2.0;
    Ok(0.5 * PI.ln() + 0.5 * r * a.ln() + a - ln_gamma((r + 1.0) / 2.0))
}

pub fn gammasq_report(r: f64, lambda: f64, t: f64) -> BoundReport {
    BoundReport::new(
        "gammasq",
        &[("lambda", lambda), ("r", r), ("t", t)],
        gammasq_bound(r, lambda, t).ok(),
        &[],
    )
}

/// `sqrt(e^(J(J+1)/N) - 1)`, bounding the distance between the laws of the
/// first `J` spacings under `mu` and `mu_N`. Valid for `2J/N <= ln(2)/2`.
pub fn tv_bound_mu_vs_mun(j: usize, n: usize) -> Result<f64, InfiniteError> {
    let (jf, nf) = (j as f64, n as f64);
    if j == 0 || n == 0 || 2.0 * jf / nf > 2f64.ln() / 2.0 {
        return Err(InfiniteError::WindowViolation { j, n });
    }
    Ok((jf * (jf + 1.0) / nf).exp_m1().sqrt())
}

pub fn tv_report(j: usize, n: usize) -> BoundReport {
    BoundReport::new(
        "TV",
        &[("j", j as f64), ("n", n as f64)],
        tv_bound_mu_vs_mun(j, n).ok(),
        &[],
    )
}
