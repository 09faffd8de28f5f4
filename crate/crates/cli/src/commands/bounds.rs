use atlas_core::infinite::{
    gammasq_report, key_estimate_bound, tv_report, BoundReport, KeyEstimate,
};

use super::Outcome;
use crate::config::{BoundsSection, KeGrid};
use crate::error::CliError;
use crate::output::{num, opt, report, Output};

pub const NAME: &str = "bounds-table";

pub const HEADER: [&str; 9] = [
    "bound",
    "k",
    "j",
    "n",
    "t",
    "r",
    "lambda",
    "value",
    "precondition_ok",
];

fn ke_reports(
    grid: &KeGrid,
    make: impl Fn(usize, usize, usize) -> Option<KeyEstimate>,
) -> Vec<BoundReport> {
    let ks = if grid.k.is_empty() {
        vec![1]
    } else {
        grid.k.clone()
    };
    let js = if grid.j.is_empty() {
        vec![0]
    } else {
        grid.j.clone()
    };
    let mut out = Vec::new();
    for &t in &grid.t {
        for &k in &ks {
            for &j in &js {
                for &n in &grid.n {
                    if let Some(v) = make(k, j, n) {
                        out.push(key_estimate_bound(v, t));
                    }
                }
            }
        }
    }
    out
}

/// Evaluates every configured grid, in the order KE1, KE2, KE3, TV, gammasq.
pub fn table(cfg: &BoundsSection) -> Vec<BoundReport> {
    let mut reports = Vec::new();
    if let Some(g) = &cfg.ke1 {
        let g = KeGrid {
            k: vec![1],
            j: Vec::new(),
            ..g.clone()
        };
        reports.extend(ke_reports(&g, |_, _, n| Some(KeyEstimate::Ke1 { n })));
    }
    if let Some(g) = &cfg.ke2 {
        let g = KeGrid {
            j: Vec::new(),
            ..g.clone()
        };
        reports.extend(ke_reports(&g, |k, _, n| Some(KeyEstimate::Ke2 { k, n })));
    }
    if let Some(g) = &cfg.ke3 {
        reports.extend(ke_reports(g, |k, j, n| Some(KeyEstimate::Ke3 { k, j, n })));
    }
    if let Some(g) = &cfg.tv {
        for &j in &g.j {
            for &n in &g.n {
                reports.push(tv_report(j, n));
            }
        }
    }
    if let Some(g) = &cfg.gammasq {
        for &r in &g.r {
            for &lambda in &g.lambda {
                for &t in &g.t {
                    reports.push(gammasq_report(r, lambda, t));
                }
            }
        }
    }
    reports
}

pub fn row(b: &BoundReport) -> Vec<String> {
    let get = |key: &str| b.inputs.get(key).copied();
    let int = |key: &str| get(key).map(|v| (v as u64).to_string()).unwrap_or_default();
    vec![
        b.name.clone(),
        int("k"),
        int("j"),
        int("n"),
        opt(get("t")),
        opt(get("r")),
        opt(get("lambda")),
        b.value.map(num).unwrap_or_default(),
        b.precondition_ok.to_string(),
    ]
}

pub fn run(cfg: &BoundsSection, seed: u64, out: &Output) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let reports = table(cfg);
    let rows: Vec<Vec<String>> = reports.iter().map(row).collect();
    out.csv("bounds.csv", &HEADER, &rows)?;
    out.json(
        "report.json",
        &report(NAME, seed, cfg, serde_json::to_value(&reports)?, true),
    )?;
    let ok = reports.iter().filter(|r| r.precondition_ok).count();
    Ok(Outcome {
        pass: true,
        summary: format!("{} bounds, {ok} inside their preconditions", reports.len()),
    })
}
