use atlas_core::model::DriftSpec;
use atlas_core::rbm::{
    atlas_wedge_drift, decompose_drift, divergence_probe, rbm_stationary_check, Polyhedron,
    RbmConfig,
};
use atlas_core::rng::derive_seed;
use serde_json::json;

use super::Outcome;
use crate::config::RbmSection;
use crate::error::CliError;
use crate::output::{num, report, Output};

pub const NAME: &str = "rbm-check";

pub fn setup(cfg: &RbmSection) -> Result<(Polyhedron<f64>, Vec<f64>), CliError> {
    match (&cfg.rows, &cfg.delta) {
        (Some(rows), Some(delta)) => Ok((Polyhedron::new(rows.clone())?, delta.clone())),
        _ => {
            let drifts = DriftSpec::new(cfg.drifts.clone())?;
            let poly = Polyhedron::atlas_wedge(drifts.len())?;
            Ok((poly, atlas_wedge_drift(&drifts, cfg.theta)))
        }
    }
}

pub fn run(
    cfg: &RbmSection,
    seed: u64,
    out: &Output,
    expect_divergence: bool,
) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let (poly, delta) = setup(cfg)?;
    let dec = decompose_drift(&poly, &delta)?;
    let ergodic = dec.a.iter().all(|&a| a > 0.0);
    if !ergodic && expect_divergence {
        let probe = divergence_probe(
            &poly,
            &delta,
            &cfg.divergence_times,
            cfg.dt,
            cfg.replicas,
            cfg.scheme,
            derive_seed(seed, "rbm-check-divergence"),
        )?;
        let results = json!({ "a": dec.a, "ergodic": false, "divergence": probe });
        out.json("report.json", &report(NAME, seed, cfg, results, true))?;
        return Ok(Outcome {
            pass: true,
            summary: "divergence probe (no stationary law)".into(),
        });
    }
    let run_cfg = RbmConfig {
        dt: cfg.dt,
        replicas: cfg.replicas,
        horizon: cfg.horizon,
        scheme: cfg.scheme,
        level: cfg.level,
    };
    let rep = rbm_stationary_check(&poly, &delta, &run_cfg, derive_seed(seed, NAME))?;
    let pass = rep.pass();
    let rows: Vec<Vec<String>> = rep
        .constraints
        .iter()
        .map(|c| {
            vec![
                (c.index + 1).to_string(),
                num(c.expected_rate),
                num(c.fit.rate),
                num(c.fit.se),
                num(c.ks.statistic),
                num(c.ks.critical_value),
                c.ks.reject.to_string(),
            ]
        })
        .collect();
    out.csv(
        "constraints.csv",
        &[
            "i",
            "expected_rate",
            "rate",
            "se",
            "ks_statistic",
            "ks_critical",
            "ks_reject",
        ],
        &rows,
    )?;
    out.json("report.json", &report(NAME, seed, cfg, json!(rep), pass))?;
    let a: Vec<String> = rep.a.iter().map(|a| format!("{a:.4}")).collect();
    Ok(Outcome {
        pass,
        summary: format!("a = ({}), horizon {}", a.join(", "), rep.horizon),
    })
}
