use atlas_core::infinite::{
    choose_truncation, conjecture_probe_cnjhar, gammasq_bound, harris_tagged_run,
    run_infinite_atlas, sample_initial, tv_bound_mu_vs_mun, ConjectureConfig, HarrisConfig,
    InfiniteConfig, InitialLaw, DEFAULT_N_CAP,
};
use atlas_core::rng::{replica_rng, run_replicas};
use atlas_core::stats::{ks_one_sample, ks_two_sample};
use rand::Rng;
use statrs::function::gamma::ln_gamma;

fn exp_cdf(rate: f64) -> impl Fn(f64) -> f64 {
    move |x| 1.0 - (-rate * x.max(0.0)).exp()
}

#[test]
fn mu_and_mu_n_spacing_laws() {
    let draws = run_replicas(31, 5000, |_, rng| {
        let a = sample_initial(&InitialLaw::Mu { delta: 0.7 }, 6, rng).unwrap();
        let b = sample_initial(&InitialLaw::MuN { n: 4 }, 6, rng).unwrap();
        (a, b)
    });
    for i in 1..6 {
        let gaps: Vec<f64> = draws.iter().map(|(a, _)| a[i] - a[i - 1]).collect();
        assert!(
            !ks_one_sample(&gaps, exp_cdf(1.4), 0.01).unwrap().reject,
            "mu gap {i}"
        );
        let rate = if i < 4 {
            2.0 * (1.0 - i as f64 / 4.0)
        } else {
            2.0
        };
        let gaps: Vec<f64> = draws.iter().map(|(_, b)| b[i] - b[i - 1]).collect();
        assert!(
            !ks_one_sample(&gaps, exp_cdf(rate), 0.01).unwrap().reject,
            "mu_N gap {i}"
        );
    }
    assert!(draws.iter().all(|(a, b)| a[0] == 0.0 && b[0] == 0.0));
}

#[test]
fn truncation_is_monotone() {
    let mut prev = 0;
    for eps in [1e-1, 1e-2, 1e-3, 1e-5, 1e-8] {
        let n = choose_truncation(3, 1.0, eps, DEFAULT_N_CAP).unwrap().n;
        assert!(n >= prev, "eps {eps}: {n} < {prev}");
        prev = n;
    }
    let mut prev = 0;
    for t in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let n = choose_truncation(2, t, 1e-3, DEFAULT_N_CAP).unwrap().n;
        assert!(n >= prev, "t {t}: {n} < {prev}");
        prev = n;
    }
}

/// `E exp(-Y^2 / 2t)` for `Y ~ Gamma(r, lambda)` by composite Simpson in log space.
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

#[test]
fn gammasq_quadrature_reference() {
    // int_0^inf 2 e^(-2y) e^(-4y^2) dy, evaluated independently with an
    // adaptive Gauss-Kronrod rule.
    assert!((gammasq_truth(1.0, 2.0, 0.125) - 0.545_641_36).abs() < 1e-7);
    assert!(gammasq_bound(1.0, 2.0, 0.125).unwrap() > 0.545_641_36);
}

#[test]
fn gammasq_dominates_quadrature() {
    let mut rng = replica_rng(32, 0);
    for _ in 0..100 {
        let r = rng.random_range(1.0..10.0);
        let lambda = rng.random_range(0.2..5.0);
        let t = rng.random_range(0.01..5.0);
        let bound = gammasq_bound(r, lambda, t).unwrap();
        let truth = gammasq_truth(r, lambda, t);
        assert!(
            bound >= truth * (1.0 - 1e-9),
            "r={r} lambda={lambda} t={t}: {bound} < {truth}"
        );
    }
}

/// Exact `int |g - f|` between the laws of the first `j` spacings under `mu`
/// (`f`, rate 2) and `mu_n` (`g`), by a midpoint rule in `u_i = 1 - e^(-2 x_i)`
/// where `f` is uniform.
fn tv_truth(j: usize, n: usize, grid: usize) -> f64 {
    let h = 1.0 / grid as f64;
    let factor = |i: usize, u: f64| {
        let c = i as f64 / n as f64;
        // (1 - c) e^(2 c x) with x = -ln(1 - u)/2.
        (1.0 - c) * (1.0 - u).powf(-c)
    };
    let cols: Vec<Vec<f64>> = (1..=j)
        .map(|i| (0..grid).map(|m| factor(i, (m as f64 + 0.5) * h)).collect())
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

#[test]
fn tv_bound_dominates_exact_distance() {
    for (j, n) in [
        (1, 10),
        (1, 100),
        (2, 20),
        (2, 200),
        (3, 20),
        (3, 60),
        (3, 1000),
    ] {
        let bound = tv_bound_mu_vs_mun(j, n).unwrap();
        let grid = if j == 3 { 150 } else { 2000 };
        let truth = tv_truth(j, n, grid);
        assert!(bound >= truth, "J={j} N={n}: {bound} < {truth}");
    }
    // J = 1: the densities cross once, at e^(-2x) = (1-c)^(1/c) with c = 1/N,
    // so the L1 distance is 2 ((1-c)^((1-c)/c) - (1-c)^(1/c)).
    let c: f64 = 0.1;
    let closed = 2.0 * ((1.0 - c).powf((1.0 - c) / c) - (1.0 - c).powf(1.0 / c));
    assert!((tv_truth(1, 10, 200_000) - closed).abs() < 1e-4);
}

#[test]
fn finite_time_spacings_are_stationary() {
    for (i, delta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let cfg = InfiniteConfig {
            replicas: 1000,
            ..InfiniteConfig::default()
        };
        let run = run_infinite_atlas(&InitialLaw::Mu { delta }, 3, 1.0, 1e-3, &cfg, 40 + i as u64)
            .unwrap();
        for j in 0..3 {
            let col = run.terminal_column(j);
            let t = ks_one_sample(&col, exp_cdf(2.0 * delta), 0.01).unwrap();
            assert!(!t.reject, "delta={delta} spacing {j}: {t:?}");
        }
    }
}

#[test]
fn doubling_particles_changes_nothing() {
    let law = InitialLaw::Mu { delta: 1.0 };
    let base = InfiniteConfig {
        replicas: 1500,
        ..InfiniteConfig::default()
    };
    let plan = run_infinite_atlas(&law, 3, 1.0, 1e-3, &base, 50).unwrap();
    let doubled = InfiniteConfig {
        n_override: Some(2 * plan.particles),
        ..base.clone()
    };
    let big = run_infinite_atlas(&law, 3, 1.0, 1e-3, &doubled, 51).unwrap();
    assert_eq!(big.particles, 2 * plan.particles);
    for j in 0..3 {
        let t = ks_two_sample(&plan.terminal_column(j), &big.terminal_column(j), 0.01).unwrap();
        assert!(!t.reject, "spacing {j}: {t:?}");
    }
}

#[test]
fn harris_is_deterministic_and_scales() {
    let cfg = HarrisConfig {
        replicas: 400,
        ..HarrisConfig::default()
    };
    let a = harris_tagged_run(0.5, &[1.0, 4.0, 16.0], &cfg, 60).unwrap();
    let b = harris_tagged_run(0.5, &[1.0, 4.0, 16.0], &cfg, 60).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.summaries.len(), 3);
    let slope = a.fit.as_ref().unwrap().slope;
    assert!((slope - 0.25).abs() < 0.1, "{slope}");
}

#[test]
fn conjecture_report_shape() {
    let cfg = ConjectureConfig {
        replicas: 40,
        dt: 0.02,
        ..ConjectureConfig::default()
    };
    let r = conjecture_probe_cnjhar(1.0, &[1, 3], &[0.5, 1.0], &cfg, 70).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert!(r
        .rows
        .iter()
        .all(|row| row.c_hat_lo <= row.c_hat && row.c_hat <= row.c_hat_hi));
    assert_eq!(
        r,
        conjecture_probe_cnjhar(1.0, &[1, 3], &[0.5, 1.0], &cfg, 70).unwrap()
    );
}
