use atlas_core::infinite::{choose_truncation, run_infinite_atlas, InfiniteConfig, InitialLaw};
use atlas_core::rng::derive_seed;
use atlas_core::stats::{fit_exponential_rate, independence_check, ks_one_sample};
use serde_json::json;

use super::Outcome;
use crate::config::InfiniteSection;
use crate::error::CliError;
use crate::output::{num, report, Output};

pub const NAME: &str = "stationary-infinite";

pub fn run(
    cfg: &InfiniteSection,
    seed: u64,
    out: &Output,
    plan_only: bool,
) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let plan = choose_truncation(cfg.k, cfg.delta * cfg.delta * cfg.t, cfg.epsilon, cfg.n_cap)?;
    out.json("plan.json", &plan)?;
    if plan_only {
        return Ok(Outcome {
            pass: true,
            summary: format!("plan N = {} (envelope {:e})", plan.n, plan.envelope),
        });
    }
    let run_cfg = InfiniteConfig {
        dt: cfg.dt,
        replicas: cfg.replicas,
        n_cap: cfg.n_cap,
        n_override: None,
    };
    let run = run_infinite_atlas(
        &InitialLaw::Mu { delta: cfg.delta },
        cfg.k,
        cfg.t,
        cfg.epsilon,
        &run_cfg,
        derive_seed(seed, NAME),
    )?;
    let rate = 2.0 * cfg.delta;
    let columns: Vec<Vec<f64>> = (0..cfg.k).map(|j| run.terminal_column(j)).collect();
    let mut pass = true;
    let mut spacings = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let positive: Vec<f64> = col.iter().copied().filter(|&x| x > 0.0).collect();
        let fit = fit_exponential_rate(&positive)?;
        let ks = ks_one_sample(col, |x| 1.0 - (-rate * x.max(0.0)).exp(), cfg.level)?;
        pass &= !ks.reject;
        spacings.push(json!({ "j": j + 1, "expected_rate": rate, "fit": fit, "ks": ks }));
    }
    let independence = if cfg.k >= 2 {
        let r = independence_check(&columns)?;
        pass &= r.pass();
        Some(r)
    } else {
        None
    };
    let results = json!({
        "plan": plan,
        "particles": run.particles,
        "spacings": spacings,
        "independence": independence,
    });
    out.json("report.json", &report(NAME, seed, cfg, results, pass))?;
    let header: Vec<String> = std::iter::once("replica".to_string())
        .chain((1..=cfg.k).map(|j| format!("delta_{j}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..cfg.replicas)
        .map(|r| {
            std::iter::once(r.to_string())
                .chain(columns.iter().map(|c| num(c[r])))
                .collect()
        })
        .collect();
    out.csv("spacings.csv", &header, &rows)?;
    Ok(Outcome {
        pass,
        summary: format!("N = {} particles, {} replicas", run.particles, cfg.replicas),
    })
}
