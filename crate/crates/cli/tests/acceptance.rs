//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails. `ACCEPTANCE_ONLY=1,5` restricts the
//! run to the listed criteria.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use atlas_core::infinite::{
    complement_frequency, gammasq_bound, harris_tagged_run, key_estimate_bound, tv_bound_mu_vs_mun,
    HarrisConfig, KeyEstimate,
};
use atlas_core::model::{
    check_tightness, compute_alphas, sample_centered_stationary, stationary_spacing_law, DriftSpec,
    Tightness,
};
use atlas_core::particles::{
    center_of_mass_checks, girsanov_reweight, local_time_from_counters, run_ensemble,
    spacing_growth_probe, time_reversal_test, StepConfig,
};
use atlas_core::rbm::{
    atlas_wedge_drift, rbm_stationary_check, rbm_terminal_samples, Polyhedron, RbmConfig,
    ReflectionScheme,
};
use atlas_core::rng::replica_rng;
use atlas_core::stats::{ks_two_sample, mean_estimate};
use atlas_sim::commands::{finite, infinite};
use atlas_sim::config::{FiniteConfig, InfiniteSection};
use atlas_sim::output::Output;
use rand::Rng;
use serde_json::Value;
use statrs::function::gamma::ln_gamma;

type Verdict = Result<(bool, String), String>;
type Criterion = (usize, &'static str, fn() -> Verdict);

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [Criterion; 12] = [
        (1, "Atlas N=4 stationary spacing rates", c1_atlas_rates),
        (
            2,
            "general drifts (2,1,-1) stationary rates",
            c2_general_drifts,
        ),
        (3, "non-tight drifts: spacing growth", c3_non_tight_growth),
        (4, "center of mass law and independence", c4_center_of_mass),
        (
            5,
            "RBM wedge vs particle spacings; half-line RBM",
            c5_rbm_cross_validation,
        ),
        (6, "Girsanov reweighting consistency", c6_girsanov),
        (7, "local time of a driftless pair", c7_local_time),
        (
            8,
            "infinite Atlas stationarity under truncation",
            c8_infinite_stationarity,
        ),
        (
            9,
            "bound dominance (KE1-3, gammasq, TV)",
            c9_bound_dominance,
        ),
        (10, "tagged particle t^(1/4) scaling", c10_harris_scaling),
        (11, "reversibility surrogate", c11_reversibility),
        (
            12,
            "byte-identical artifacts across thread caps",
            c12_determinism,
        ),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {id:>2} [{name}] ({secs:.1}s): {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn read_report(dir: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(dir.join("report.json")).map_err(err)?;
    serde_json::from_str(&text).map_err(err)
}

/// Rate, KS and correlation gates read back from a `stationary-finite` report.
fn finite_gates(drifts: Option<Vec<f64>>, expected: &[f64], seed: u64) -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let out = Output::create(dir.path()).map_err(err)?;
    let cfg = FiniteConfig {
        drifts,
        dt: 1e-3,
        horizon: 20.0,
        replicas: 2000,
        level: 0.01,
        ..FiniteConfig::default()
    };
    finite::run(&cfg, seed, &out, false).map_err(err)?;
    let report = read_report(dir.path())?;
    let results = &report["results"];
    let spacings = results["spacings"].as_array().ok_or("missing spacings")?;
    let mut pass = spacings.len() == expected.len();
    let mut parts = Vec::new();
    for (s, &target) in spacings.iter().zip(expected) {
        let rate = s["fit"]["rate"].as_f64().ok_or("rate")?;
        let se = s["fit"]["se"].as_f64().ok_or("se")?;
        let ks_reject = s["ks"]["reject"].as_bool().ok_or("ks")?;
        let ok = (rate - target).abs() <= 3.0 * se && !ks_reject;
        pass &= ok;
        parts.push(format!(
            "{rate:.3}+-{se:.3} vs {target:.3} (KS D={:.4}{})",
            s["ks"]["statistic"].as_f64().unwrap_or(f64::NAN),
            if ks_reject { " reject" } else { "" }
        ));
    }
    let max_corr = results["independence"]["max_abs"]
        .as_f64()
        .ok_or("independence")?;
    let gate = 3.0 / 2000f64.sqrt();
    pass &= max_corr < gate;
    Ok((
        pass,
        format!(
            "rates {}; max |corr| {max_corr:.4} < {gate:.4}",
            parts.join(", ")
        ),
    ))
}

fn c1_atlas_rates() -> Verdict {
    finite_gates(Some(vec![1.0, 0.0, 0.0, 0.0]), &[1.5, 1.0, 0.5], 101)
}

fn c2_general_drifts() -> Verdict {
    finite_gates(Some(vec![2.0, 1.0, -1.0]), &[8.0 / 3.0, 10.0 / 3.0], 102)
}

fn c3_non_tight_growth() -> Verdict {
    let drifts = DriftSpec::new(vec![0.0, 0.0, 0.0, 1.0]).map_err(err)?;
    let flagged = check_tightness(&compute_alphas(&drifts));
    let probe =
        spacing_growth_probe(&drifts, &[5.0, 10.0, 20.0], 1e-3, 1000, 0.99, 103).map_err(err)?;
    let fit = &probe.fits[0];
    let means: Vec<String> = probe
        .mean_spacings
        .iter()
        .map(|m| format!("{:.3}", m[0].mean))
        .collect();
    let pass =
        flagged == Tightness::NotTight { k: 1 } && fit.ci_lo > 0.0 && probe.growing.contains(&0);
    Ok((
        pass,
        format!(
            "tightness {flagged:?}; mean first spacing ({}) at t = 5, 10, 20; slope {:.4}, 99% CI [{:.4}, {:.4}]",
            means.join(", "),
            fit.slope,
            fit.ci_lo,
            fit.ci_hi
        ),
    ))
}

fn c4_center_of_mass() -> Verdict {
    let drifts = DriftSpec::atlas(4, 1.0).map_err(err)?;
    let cfg = StepConfig::new(1e-3, 1.0)
        .endpoints_only()
        .without_occupation();
    let ens = run_ensemble(104, 5000, &drifts, &cfg, |_| vec![0.0; 4]).map_err(err)?;
    let r = center_of_mass_checks(&ens.trajectories, &drifts).map_err(err)?;
    let max_corr = r
        .spacing_correlations
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    Ok((
        r.pass(),
        format!(
            "mean {:.4}+-{:.4} vs {:.4}; variance {:.4}+-{:.4} vs {:.4}; max |corr| {max_corr:.4} < {:.4}",
            r.mean.mean,
            r.mean.se,
            r.expected_mean,
            r.variance.mean,
            r.variance.se,
            r.expected_variance,
            r.correlation_gate
        ),
    ))
}

fn c5_rbm_cross_validation() -> Verdict {
    let drifts = DriftSpec::atlas(3, 1.0).map_err(err)?;
    let poly = Polyhedron::atlas_wedge(3).map_err(err)?;
    let delta = atlas_wedge_drift(&drifts, 1.0);
    let cfg = RbmConfig {
        dt: 1e-3,
        replicas: 10_000,
        horizon: None,
        scheme: ReflectionScheme::Mirror,
        level: 0.01,
    };
    let (_, horizon, rbm) = rbm_terminal_samples(&poly, &delta, &cfg, 105).map_err(err)?;
    let step = StepConfig::new(1e-3, horizon)
        .endpoints_only()
        .without_occupation();
    let ens = run_ensemble(205, 10_000, &drifts, &step, |_| vec![0.0; 3]).map_err(err)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for j in 0..2 {
        let a: Vec<f64> = rbm.iter().map(|b| b[j]).collect();
        let b = ens.terminal_spacing(j);
        let ks = ks_two_sample(&a, &b, 0.01).map_err(err)?;
        pass &= !ks.reject;
        parts.push(format!(
            "spacing {} D={:.4} (crit {:.4})",
            j + 1,
            ks.statistic,
            ks.critical_value
        ));
    }
    let theta = 1.0;
    let half_line = Polyhedron::new(vec![vec![1.0]]).map_err(err)?;
    let cfg1 = RbmConfig {
        horizon: Some(10.0),
        ..cfg
    };
    let rep = rbm_stationary_check(&half_line, &[-theta], &cfg1, 305).map_err(err)?;
    let c = &rep.constraints[0];
    let ok1 = !c.ks.reject && (c.expected_rate - 2.0 * theta).abs() < 1e-12;
    pass &= ok1;
    Ok((
        pass,
        format!(
            "wedge horizon {horizon:.1}: {}; K=1 Exp({}) KS D={:.4} (crit {:.4}), rate {:.3}",
            parts.join(", "),
            2.0 * theta,
            c.ks.statistic,
            c.ks.critical_value,
            c.fit.rate
        ),
    ))
}

fn c6_girsanov() -> Verdict {
    let atlas = DriftSpec::atlas(3, 1.0).map_err(err)?;
    let zero = DriftSpec::zeros(3).map_err(err)?;
    let cfg = StepConfig::new(1e-3, 1.0)
        .endpoints_only()
        .without_occupation();
    let direct = run_ensemble(106, 10_000, &atlas, &cfg, |_| vec![0.0; 3]).map_err(err)?;
    let direct = mean_estimate(&direct.terminal_spacing(0)).map_err(err)?;
    let base = run_ensemble(206, 10_000, &zero, &cfg, |_| vec![0.0; 3]).map_err(err)?;
    let weights: Vec<f64> = base
        .trajectories
        .iter()
        .map(|t| girsanov_reweight(t, &atlas))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let weighted: Vec<f64> = weights
        .iter()
        .zip(base.terminal_spacing(0))
        .map(|(w, d)| w * d)
        .collect();
    let reweighted = mean_estimate(&weighted).map_err(err)?;
    let w = mean_estimate(&weights).map_err(err)?;
    let (a_lo, a_hi) = direct.ci(0.99);
    let (b_lo, b_hi) = reweighted.ci(0.99);
    let overlap = a_lo <= b_hi && b_lo <= a_hi;
    let weight_ok = w.within_se(1.0, 3.0);
    Ok((
        overlap && weight_ok,
        format!(
            "direct {:.4} [{a_lo:.4}, {a_hi:.4}], reweighted {:.4} [{b_lo:.4}, {b_hi:.4}]; mean weight {:.4}+-{:.4}",
            direct.mean, reweighted.mean, w.mean, w.se
        ),
    ))
}

fn c7_local_time() -> Verdict {
    let zero = DriftSpec::zeros(2).map_err(err)?;
    let cfg = StepConfig::new(1e-5, 1.0)
        .endpoints_only()
        .without_occupation()
        .with_local_time(0.02);
    let ens = run_ensemble(107, 10_000, &zero, &cfg, |_| vec![0.0; 2]).map_err(err)?;
    let values: Vec<f64> = ens
        .trajectories
        .iter()
        .map(|t| local_time_from_counters(t, 1).ok_or("local-time counters missing"))
        .collect::<Result<_, _>>()?;
    let m = mean_estimate(&values).map_err(err)?;
    let target = 0.5 * (2.0 / std::f64::consts::PI).sqrt();
    let rel = (m.mean / target - 1.0).abs();
    Ok((
        rel <= 0.05,
        format!(
            "mean {:.4}+-{:.4} vs target {target:.4} (rel. error {:.1}%; sqrt(2/pi) = {:.4})",
            m.mean,
            m.se,
            100.0 * rel,
            (2.0 / std::f64::consts::PI).sqrt()
        ),
    ))
}

fn c8_infinite_stationarity() -> Verdict {
    let dir = tempfile::tempdir().map_err(err)?;
    let out = Output::create(dir.path()).map_err(err)?;
    let cfg = InfiniteSection {
        delta: 1.0,
        k: 3,
        t: 1.0,
        epsilon: 1e-3,
        replicas: 2000,
        level: 0.01,
        ..InfiniteSection::default()
    };
    let outcome = infinite::run(&cfg, 108, &out, false).map_err(err)?;
    let report = read_report(dir.path())?;
    let n = report["results"]["plan"]["n"].as_u64().ok_or("plan")?;
    let ks: Vec<String> = report["results"]["spacings"]
        .as_array()
        .ok_or("spacings")?
        .iter()
        .map(|s| format!("{:.4}", s["ks"]["statistic"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    let max_corr = report["results"]["independence"]["max_abs"]
        .as_f64()
        .unwrap_or(f64::NAN);
    Ok((
        outcome.pass && n <= 100,
        format!(
            "plan N = {n}; KS D = ({}); max |corr| {max_corr:.4}",
            ks.join(", ")
        ),
    ))
}

/// `E exp(-Y^2 / 2t)` for `Y ~ Gamma(r, lambda)` by composite Simpson.
fn gammasq_truth(r: f64, lambda: f64, t: f64) -> f64 {
    let ln_norm = r * lambda.ln() - ln_gamma(r);
    let f = |y: f64| {
        if y <= 0.0 {
            return if r == 1.0 { lambda } else { 0.0 };
        }
        (ln_norm + (r - 1.0) * y.ln() - lambda * y - y * y / (2.0 * t)).exp()
    };
    let upper = (r + 40.0 * r.sqrt()) / lambda + 40.0 * t.sqrt();
    let m = 200_000;
    let h = upper / m as f64;
    let mut s = f(0.0) + f(upper);
    for i in 1..m {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `int |g - f|` between the first `j` spacings under `mu` and `mu_n`, by a
/// midpoint rule in `u_i = 1 - e^(-2 x_i)`.
fn tv_truth(j: usize, n: usize, grid: usize) -> f64 {
    let h = 1.0 / grid as f64;
    let cols: Vec<Vec<f64>> = (1..=j)
        .map(|i| {
            let c = i as f64 / n as f64;
            (0..grid)
                .map(|m| (1.0 - c) * (1.0 - (m as f64 + 0.5) * h).powf(-c))
                .collect()
        })
        .collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; j];
    loop {
        let ratio: f64 = idx.iter().enumerate().map(|(i, &m)| cols[i][m]).product();
        total += (ratio - 1.0).abs();
        let mut d = 0;
        loop {
            if d == j {
                return total * h.powi(j as i32);
            }
            idx[d] += 1;
            if idx[d] < grid {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn c9_bound_dominance() -> Verdict {
    use KeyEstimate::*;
    let sets = [
        (Ke1 { n: 3 }, 0.05),
        (Ke1 { n: 4 }, 0.1),
        (Ke1 { n: 5 }, 0.1),
        (Ke1 { n: 6 }, 0.1),
        (Ke1 { n: 8 }, 0.15),
        (Ke1 { n: 10 }, 0.2),
        (Ke2 { k: 2, n: 5 }, 0.05),
        (Ke2 { k: 2, n: 6 }, 0.1),
        (Ke2 { k: 3, n: 8 }, 0.1),
        (Ke2 { k: 4, n: 10 }, 0.1),
        (Ke2 { k: 2, n: 8 }, 0.15),
        (Ke2 { k: 5, n: 12 }, 0.15),
        (Ke2 { k: 3, n: 10 }, 0.2),
        (Ke3 { k: 2, j: 5, n: 9 }, 0.05),
        (Ke3 { k: 1, j: 4, n: 8 }, 0.1),
        (Ke3 { k: 2, j: 6, n: 10 }, 0.1),
        (Ke3 { k: 3, j: 8, n: 12 }, 0.1),
        (Ke3 { k: 2, j: 8, n: 12 }, 0.15),
        (Ke3 { k: 3, j: 10, n: 14 }, 0.15),
        (Ke3 { k: 1, j: 8, n: 12 }, 0.2),
    ];
    let mut pass = true;
    let mut worst: Option<(f64, String)> = None;
    let mut informative = 0;
    for (i, &(variant, t)) in sets.iter().enumerate() {
        let b = key_estimate_bound(variant, t);
        let bound = b
            .value
            .ok_or_else(|| format!("{variant:?} at t = {t} is outside its precondition"))?;
        let f = complement_frequency(variant, t, 2e-4, 5000, 20, 109 + i as u64).map_err(err)?;
        let ok = f.frequency <= bound + 3.0 * f.se;
        pass &= ok;
        if bound < 1.0 {
            informative += 1;
        }
        let margin = bound + 3.0 * f.se - f.frequency;
        let label = format!(
            "{variant:?} t={t}: freq {:.4} vs bound {bound:.4}",
            f.frequency
        );
        if !ok {
            println!("  dominance violated: {label}");
        }
        if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            worst = Some((margin, label));
        }
    }
    let mut rng = replica_rng(209, 0);
    let mut gammasq_ok = 0;
    for _ in 0..100 {
        let r = rng.random_range(1.0..10.0);
        let lambda = rng.random_range(0.2..5.0);
        let t = rng.random_range(0.01..5.0);
        let bound = gammasq_bound(r, lambda, t).map_err(err)?;
        if bound >= gammasq_truth(r, lambda, t) * (1.0 - 1e-9) {
            gammasq_ok += 1;
        }
    }
    pass &= gammasq_ok == 100;
    let mut tv_ok = 0;
    let tv_sets = [
        (1, 10),
        (1, 100),
        (1, 1000),
        (2, 20),
        (2, 200),
        (3, 20),
        (3, 60),
        (3, 1000),
    ];
    for (j, n) in tv_sets {
        let grid = if j == 3 { 150 } else { 2000 };
        if tv_bound_mu_vs_mun(j, n).map_err(err)? >= tv_truth(j, n, grid) {
            tv_ok += 1;
        }
    }
    pass &= tv_ok == tv_sets.len();
    Ok((
        pass,
        format!(
            "{} KE sets ({informative} with bound < 1), tightest: {}; gammasq {gammasq_ok}/100; TV {tv_ok}/{}",
            sets.len(),
            worst.map(|w| w.1).unwrap_or_default(),
            tv_sets.len()
        ),
    ))
}

fn c10_harris_scaling() -> Verdict {
    let cfg = HarrisConfig {
        replicas: 2000,
        tol: 1e-3,
        per_side: None,
    };
    let run = harris_tagged_run(0.5, &[4.0, 8.0, 16.0, 32.0], &cfg, 110).map_err(err)?;
    let fit = run.fit.as_ref().ok_or("no slope fit")?;
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let ratio = run.var_ratio_at_max.ok_or("no variance ratio")?;
    let slope_ok = (fit.slope - 0.25).abs() <= 0.05;
    let ratio_ok = (ratio / target - 1.0).abs() <= 0.15;
    Ok((
        slope_ok && ratio_ok,
        format!(
            "density {}, {} per side; slope {:.4} (target 0.25 +- 0.05); Var/sqrt(32) {ratio:.4} vs {target:.4}",
            run.density, run.per_side, fit.slope
        ),
    ))
}

fn c11_reversibility() -> Verdict {
    let drifts = DriftSpec::atlas(3, 1.0).map_err(err)?;
    let law = stationary_spacing_law(&compute_alphas(&drifts)).map_err(err)?;
    // Burn in from the exact law so the pair is drawn from the scheme's own equilibrium.
    let cfg = StepConfig::new(1e-3, 5.5)
        .record_every(500)
        .without_occupation();
    let ens = run_ensemble(111, 4000, &drifts, &cfg, |rng| {
        sample_centered_stationary(&law, rng).positions
    })
    .map_err(err)?;
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
    let r = time_reversal_test(&earlier, &later, 0.01).map_err(err)?;
    let worst = r
        .tests
        .iter()
        .map(|t| t.result.statistic / t.result.critical_value)
        .fold(0.0, f64::max);
    Ok((
        !r.reject(),
        format!(
            "{} projection tests at per-test level {:.4}; largest D/critical {worst:.3}",
            r.tests.len(),
            r.per_test_level
        ),
    ))
}

const DETERMINISM_CONFIG: &str = "
seed = 5
[stationary_finite]
dt = 0.01
horizon = 2.0
replicas = 200
reversal_lag = 1.0
[stationary_infinite]
k = 2
t = 0.25
epsilon = 1e-2
dt = 0.01
replicas = 200
[harris]
t_grid = [1.0, 2.0, 4.0]
replicas = 300
[conjecture_k]
k_list = [1, 2]
t_grid = [0.5, 1.0]
replicas = 40
dt = 0.05
particles = 16
[rbm_check]
dt = 0.01
replicas = 300
horizon = 2.0
";

const COMMANDS: [&str; 6] = [
    "stationary-finite",
    "stationary-infinite",
    "harris",
    "conjecture-k",
    "rbm-check",
    "bounds-table",
];

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for cmd in fs::read_dir(dir).map_err(err)? {
        let cmd = cmd.map_err(err)?;
        for f in fs::read_dir(cmd.path()).map_err(err)? {
            let f = f.map_err(err)?;
            let key = format!(
                "{}/{}",
                cmd.file_name().to_string_lossy(),
                f.file_name().to_string_lossy()
            );
            files.insert(key, fs::read(f.path()).map_err(err)?);
        }
    }
    Ok(files)
}

fn c12_determinism() -> Verdict {
    let work = tempfile::tempdir().map_err(err)?;
    let config = work.path().join("config.toml");
    fs::write(&config, DETERMINISM_CONFIG).map_err(err)?;
    let mut runs = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = work.path().join(format!("out-{threads}"));
        let mut codes = Vec::new();
        for cmd in COMMANDS {
            let status = Command::new(env!("CARGO_BIN_EXE_atlas-sim"))
                .arg(cmd)
                .arg("--config")
                .arg(&config)
                .arg("--output-dir")
                .arg(&out)
                .env("ATLAS_SIM_THREADS", threads)
                .output()
                .map_err(err)?
                .status;
            codes.push(status.code().unwrap_or(-1));
        }
        runs.push((codes, snapshot(&out)?));
    }
    let files = runs[0].1.len();
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    let completed = runs[0].0.iter().all(|&c| c == 0 || c == 1);
    Ok((
        identical && completed && files >= COMMANDS.len(),
        format!(
            "{} commands, {files} artifacts, exit codes {:?}; identical under 1, 2, 8 threads: {identical}",
            COMMANDS.len(),
            runs[0].0
        ),
    ))
}
