use atlas_core::rng::run_replicas;
use atlas_core::stats::{
    binomial_se, fit_exponential_rate, hypoexponential_cdf, ks_one_sample, ks_two_sample,
};
use rand::Rng;
use rand_distr::Exp1;

const RUNS: usize = 4000;

fn rejection_rate(n: usize, level: f64, seed: u64) -> f64 {
    let rejected = run_replicas(seed, RUNS, |_, rng| {
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        ks_one_sample(&xs, |x| x.clamp(0.0, 1.0), level)
            .unwrap()
            .reject
    });
    rejected.iter().filter(|&&r| r).count() as f64 / RUNS as f64
}

#[test]
fn one_sample_ks_holds_its_level() {
    for (i, n) in [50, 500, 5000].into_iter().enumerate() {
        for level in [0.01, 0.05] {
            let p = rejection_rate(n, level, 100 + i as u64);
            let se = binomial_se(level, RUNS);
            assert!((p - level).abs() <= 2.0 * se, "n={n} level={level}: {p}");
        }
    }
}

#[test]
fn two_sample_ks_is_not_anticonservative() {
    let level = 0.05;
    let rejected = run_replicas(7, 2000, |_, rng| {
        let a: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
        ks_two_sample(&a, &b, level).unwrap().reject
    });
    let p = rejected.iter().filter(|&&r| r).count() as f64 / 2000.0;
    assert!(p <= level + 2.0 * binomial_se(level, 2000), "{p}");
}

#[test]
fn rate_interval_coverage() {
    let rate = 1.7;
    let covered = run_replicas(8, 1000, |_, rng| {
        let xs: Vec<f64> = (0..200)
            .map(|_| rng.sample::<f64, _>(Exp1) / rate)
            .collect();
        let fit = fit_exponential_rate(&xs).unwrap();
        fit.ci_lo <= rate && rate <= fit.ci_hi
    });
    let p = covered.iter().filter(|&&c| c).count() as f64 / 1000.0;
    assert!((p - 0.95).abs() <= 2.0 * binomial_se(0.95, 1000), "{p}");
}

#[test]
fn sum_of_exponentials_matches_hypoexponential() {
    let rates = [3.0, 2.0, 1.0];
    let sums = run_replicas(9, 5000, |_, rng| {
        rates
            .iter()
            .map(|r| rng.sample::<f64, _>(Exp1) / r)
            .sum::<f64>()
    });
    let t = ks_one_sample(&sums, |x| hypoexponential_cdf(&rates, x).unwrap(), 0.01).unwrap();
    assert!(!t.reject, "{t:?}");
}
