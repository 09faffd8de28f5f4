//! `harris` and `conjecture-k`.

use atlas_core::infinite::{
    conjecture_probe_cnjhar, harris_tagged_run, ConjectureConfig, HarrisConfig, SpreadSummary,
};
use atlas_core::rng::derive_seed;
use serde_json::json;

use super::Outcome;
use crate::config::{ConjectureSection, HarrisSection};
use crate::error::CliError;
use crate::output::{num, report, Output};

pub const HARRIS: &str = "harris";
pub const CONJECTURE: &str = "conjecture-k";

const SPREAD_HEADER: [&str; 7] = ["t", "k", "mean", "sd", "ci_lo", "ci_hi", "n_replicas"];

fn spread_row(s: &SpreadSummary) -> Vec<String> {
    vec![
        num(s.t),
        s.k.to_string(),
        num(s.mean),
        num(s.sd),
        num(s.ci_lo),
        num(s.ci_hi),
        s.n_replicas.to_string(),
    ]
}

pub fn harris(cfg: &HarrisSection, seed: u64, out: &Output) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let run_cfg = HarrisConfig {
        replicas: cfg.replicas,
        tol: cfg.tol,
        per_side: cfg.per_side,
    };
    let run = harris_tagged_run(cfg.lambda, &cfg.t_grid, &run_cfg, derive_seed(seed, HARRIS))?;
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let slope = run.fit.as_ref().map(|f| f.slope);
    let slope_ok = slope.is_some_and(|s| (s - cfg.slope_target).abs() <= cfg.slope_tolerance);
    let ratio = run.var_ratio_at_max;
    let ratio_ok = ratio.is_some_and(|r| (r / target - 1.0).abs() <= cfg.variance_tolerance);
    let pass = slope_ok && ratio_ok;
    let rows: Vec<Vec<String>> = run.summaries.iter().map(spread_row).collect();
    out.csv("harris.csv", &SPREAD_HEADER, &rows)?;
    let results = json!({
        "density": run.density,
        "per_side": run.per_side,
        "summaries": run.summaries,
        "fit": run.fit,
        "slope_ok": slope_ok,
        "var_ratio_at_max": ratio,
        "var_ratio_target": target,
        "var_ratio_ok": ratio_ok,
    });
    out.json("report.json", &report(HARRIS, seed, cfg, results, pass))?;
    Ok(Outcome {
        pass,
        summary: format!(
            "slope {}, Var/sqrt(t) at t = {} is {} (target {target:.4})",
            slope.map_or("n/a".into(), |s| format!("{s:.4}")),
            cfg.t_grid.last().unwrap(),
            ratio.map_or("n/a".into(), |r| format!("{r:.4}")),
        ),
    })
}

pub fn conjecture(cfg: &ConjectureSection, seed: u64, out: &Output) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let run_cfg = ConjectureConfig {
        dt: cfg.dt,
        replicas: cfg.replicas,
        tol: cfg.tol,
        particles: cfg.particles,
    };
    let r = conjecture_probe_cnjhar(
        cfg.delta,
        &cfg.k_list,
        &cfg.t_grid,
        &run_cfg,
        derive_seed(seed, CONJECTURE),
    )?;
    let rows: Vec<Vec<String>> = r.rows.iter().map(|row| spread_row(&row.spread)).collect();
    out.csv("conjecture.csv", &SPREAD_HEADER, &rows)?;
    let results = json!({
        "delta": r.delta,
        "particles": r.particles,
        "rows": r.rows,
        "exploratory": true,
    });
    // Exploratory: nothing is asserted, so the run always passes.
    out.json("report.json", &report(CONJECTURE, seed, cfg, results, true))?;
    Ok(Outcome {
        pass: true,
        summary: format!("{} estimates with N = {}", r.rows.len(), r.particles),
    })
}
