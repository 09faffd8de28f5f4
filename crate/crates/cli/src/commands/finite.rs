use atlas_core::model::{
    check_tightness, compute_alphas, drifts_from_alphas, sample_centered_stationary,
    stationary_spacing_law, DriftSpec, Tightness,
};
use atlas_core::particles::{
    center_of_mass_checks, run_ensemble, spacing_growth_probe, time_reversal_test, StepConfig,
};
use atlas_core::rng::derive_seed;
use atlas_core::stats::{
    fit_exponential_rate, hypoexponential_cdf, independence_check, ks_one_sample,
};
use serde_json::json;

use super::Outcome;
use crate::config::{FiniteConfig, Start};
use crate::error::CliError;
use crate::output::{num, report, Output};

pub const NAME: &str = "stationary-finite";

pub fn drift_spec(cfg: &FiniteConfig) -> Result<DriftSpec<f64>, CliError> {
    Ok(match (&cfg.drifts, &cfg.alphas) {
        (Some(d), _) => DriftSpec::new(d.clone())?,
        (None, Some(a)) => drifts_from_alphas(a, cfg.mean_drift)?,
        (None, None) => DriftSpec::atlas(4, 1.0)?,
    })
}

pub fn run(
    cfg: &FiniteConfig,
    seed: u64,
    out: &Output,
    expect_divergence: bool,
) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let drifts = drift_spec(cfg)?;
    let alphas = compute_alphas(&drifts);
    let tightness = check_tightness(&alphas);
    if expect_divergence {
        return divergence(cfg, seed, out, &drifts, tightness);
    }
    if let Tightness::NotTight { k } = tightness {
        return Err(CliError::NotTight(format!(
            "alpha_{k} = {} <= 0; rerun with --expect-divergence to probe growth",
            alphas.alphas[k - 1]
        )));
    }
    let law = stationary_spacing_law(&alphas)?;
    let lag_steps = (cfg.reversal_lag / cfg.dt).round() as usize;
    let horizon_steps = (cfg.horizon / cfg.dt).round() as usize;
    if lag_steps == 0 || !horizon_steps.is_multiple_of(lag_steps) {
        return Err(CliError::Config(
            "stationary_finite.horizon must be a whole multiple of reversal_lag".into(),
        ));
    }
    let step = StepConfig::new(cfg.dt, cfg.horizon)
        .record_every(lag_steps)
        .without_occupation();
    let n = drifts.len();
    let start = cfg.start;
    let ens = run_ensemble(
        derive_seed(seed, NAME),
        cfg.replicas,
        &drifts,
        &step,
        |rng| match start {
            Start::Stationary => sample_centered_stationary(&law, rng).positions,
            Start::Origin => vec![0.0; n],
        },
    )?;

    let columns = ens.terminal_spacings();
    let mut spacings = Vec::with_capacity(columns.len());
    let mut rows = Vec::with_capacity(columns.len());
    let mut pass = true;
    for (j, col) in columns.iter().enumerate() {
        let expected = law.rates()[j];
        let positive: Vec<f64> = col.iter().copied().filter(|&x| x > 0.0).collect();
        let fit = fit_exponential_rate(&positive)?;
        let ks = ks_one_sample(col, |x| 1.0 - (-expected * x.max(0.0)).exp(), cfg.level)?;
        let rate_ok = fit.within_se(expected, 3.0);
        pass &= rate_ok && !ks.reject;
        rows.push(vec![
            (j + 1).to_string(),
            num(expected),
            num(fit.rate),
            num(fit.se),
            num(fit.ci_lo),
            num(fit.ci_hi),
            num(ks.statistic),
            num(ks.critical_value),
            ks.reject.to_string(),
        ]);
        spacings.push(json!({
            "j": j + 1,
            "expected_rate": expected,
            "fit": fit,
            "within_3se": rate_ok,
            "ks": ks,
        }));
    }
    let independence = independence_check(&columns)?;
    pass &= independence.pass();

    // Sum of the spacings is hypoexponential under the product law.
    let sums: Vec<f64> = (0..ens.len())
        .map(|r| columns.iter().map(|c| c[r]).sum())
        .collect();
    let sum_check = match hypoexponential_cdf(law.rates(), 1.0) {
        Ok(_) => {
            let t = ks_one_sample(
                &sums,
                |x| hypoexponential_cdf(law.rates(), x).unwrap_or(f64::NAN),
                cfg.level,
            )?;
            pass &= !t.reject;
            Some(t)
        }
        Err(_) => None,
    };

    let com = if ens.len() >= 500 {
        let c = center_of_mass_checks(&ens.trajectories, &drifts)?;
        pass &= c.pass();
        Some(c)
    } else {
        None
    };

    let earlier: Vec<Vec<f64>> = ens
        .trajectories
        .iter()
        .map(|t| t.samples[t.samples.len() - 2].spacings.clone())
        .collect();
    let later: Vec<Vec<f64>> = ens
        .trajectories
        .iter()
        .map(|t| t.terminal().spacings.clone())
        .collect();
    let reversal = time_reversal_test(&earlier, &later, cfg.level)?;
    pass &= !reversal.reject();

    let results = json!({
        "drifts": drifts.as_slice(),
        "alphas": alphas.alphas,
        "mean_drift": alphas.mean_drift,
        "tight": true,
        "spacings": spacings,
        "independence": independence,
        "sum_check": sum_check,
        "center_of_mass": com,
        "time_reversal": reversal,
    });
    out.json("report.json", &report(NAME, seed, cfg, results, pass))?;
    out.csv(
        "rates.csv",
        &[
            "j",
            "expected_rate",
            "rate",
            "se",
            "ci_lo",
            "ci_hi",
            "ks_statistic",
            "ks_critical",
            "ks_reject",
        ],
        &rows,
    )?;
    let header: Vec<String> = std::iter::once("replica".to_string())
        .chain((1..n).map(|j| format!("delta_{j}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let spacing_rows: Vec<Vec<String>> = (0..ens.len())
        .map(|r| {
            std::iter::once(r.to_string())
                .chain(columns.iter().map(|c| num(c[r])))
                .collect()
        })
        .collect();
    out.csv("spacings.csv", &header, &spacing_rows)?;
    let rates: Vec<String> = law.rates().iter().map(|r| format!("{r:.4}")).collect();
    Ok(Outcome {
        pass,
        summary: format!("stationary rates ({})", rates.join(", ")),
    })
}

fn divergence(
    cfg: &FiniteConfig,
    seed: u64,
    out: &Output,
    drifts: &DriftSpec<f64>,
    tightness: Tightness,
) -> Result<Outcome, CliError> {
    let probe = spacing_growth_probe(
        drifts,
        &cfg.divergence_times,
        cfg.dt,
        cfg.replicas,
        0.99,
        derive_seed(seed, "stationary-finite-divergence"),
    )?;
    let mut rows = Vec::new();
    for (i, &t) in probe.times.iter().enumerate() {
        for (j, m) in probe.mean_spacings[i].iter().enumerate() {
            rows.push(vec![num(t), (j + 1).to_string(), num(m.mean), num(m.se)]);
        }
    }
    out.csv("growth.csv", &["t", "j", "mean", "se"], &rows)?;
    let results = json!({
        "drifts": drifts.as_slice(),
        "tight": tightness.is_tight(),
        "violating_k": match tightness { Tightness::NotTight { k } => Some(k), Tightness::Tight => None },
        "growth": probe,
    });
    out.json("report.json", &report(NAME, seed, cfg, results, true))?;
    let growing: Vec<String> = probe.growing.iter().map(|j| (j + 1).to_string()).collect();
    Ok(Outcome {
        pass: true,
        summary: format!(
            "divergence probe; growing spacings: [{}]",
            growing.join(", ")
        ),
    })
}
