use atlas_core::model::{
    compute_alphas, sample_centered_stationary, stationary_spacing_law, DriftSpec,
};
use atlas_core::particles::{
    center_of_mass_checks, girsanov_reweight, rank_martingale_checks, run_ensemble, run_finite,
    time_reversal_test, StepConfig,
};
use atlas_core::rng::{replica_rng, with_threads};
use atlas_core::stats::mean_estimate;

fn stationary_init(
    drifts: &DriftSpec<f64>,
) -> impl Fn(&mut atlas_core::rng::ReplicaRng) -> Vec<f64> + Sync + Send {
    let law = stationary_spacing_law(&compute_alphas(drifts)).unwrap();
    move |rng| sample_centered_stationary(&law, rng).positions
}

#[test]
fn occupation_rows_and_columns_sum_to_elapsed_time() {
    let d = DriftSpec::atlas(4, 1.0).unwrap();
    let cfg = StepConfig::new(1e-3, 2.0).record_every(50);
    let traj = run_finite(&[0.3f64, 0.0, 0.1, 0.05], &d, &cfg, &mut replica_rng(1, 0)).unwrap();
    let diag = &traj.diagnostics;
    let occ = diag.occupation.as_ref().unwrap();
    for i in 0..4 {
        assert_eq!(occ[i * 4..i * 4 + 4].iter().sum::<u64>(), diag.steps);
        assert_eq!((0..4).map(|r| occ[r * 4 + i]).sum::<u64>(), diag.steps);
    }
    assert!((diag.elapsed() - 2.0).abs() < 1e-12);
}

#[test]
fn spacings_are_nonnegative_and_sum_to_range() {
    let d = DriftSpec::new(vec![1.0, 0.5, -0.2, -1.3]).unwrap();
    let cfg = StepConfig::new(1e-3, 1.0).record_every(7);
    let traj = run_finite(&[0.0, 0.0, 0.0, 0.0], &d, &cfg, &mut replica_rng(2, 0)).unwrap();
    for s in &traj.samples {
        assert!(s.spacings.iter().all(|&x| x >= 0.0));
        let lo = s.positions.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s
            .positions
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = s.spacings.iter().sum();
        assert!((sum - (hi - lo)).abs() <= 1e-12 * (hi - lo).max(1.0));
    }
}

#[test]
fn triple_near_fraction_shrinks_with_dt() {
    let d = DriftSpec::atlas(3, 1.0).unwrap();
    let init = stationary_init(&d);
    let fraction = |dt: f64| {
        let cfg = StepConfig::new(dt, 5.0)
            .endpoints_only()
            .without_occupation();
        let ens = run_ensemble(3, 20, &d, &cfg, &init).unwrap();
        ens.trajectories
            .iter()
            .map(|t| t.diagnostics.triple_near_fraction())
            .sum::<f64>()
            / 20.0
    };
    let f = [fraction(1e-2), fraction(1e-3), fraction(1e-4)];
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
}

#[test]
fn ensembles_do_not_depend_on_thread_count() {
    let d = DriftSpec::atlas(3, 1.0).unwrap();
    let cfg = StepConfig::new(1e-3, 0.5).record_every(100);
    let init = stationary_init(&d);
    let one = with_threads(Some(1), || run_ensemble(42, 16, &d, &cfg, &init).unwrap());
    let four = with_threads(Some(4), || run_ensemble(42, 16, &d, &cfg, &init).unwrap());
    assert_eq!(one, four);
}

#[test]
fn girsanov_weights_have_unit_mean() {
    let zero = DriftSpec::zeros(3).unwrap();
    let cfg = StepConfig::new(1e-3, 1.0)
        .endpoints_only()
        .without_occupation();
    let ens = run_ensemble(5, 4000, &zero, &cfg, |_| vec![0.0, 0.0, 0.0]).unwrap();
    // sum delta_j^2 t ranges up to 4.
    for target in [
        vec![1.0, 0.0, 0.0],
        vec![1.0, 1.0, -1.0],
        vec![0.5, -1.5, 1.0],
    ] {
        let target = DriftSpec::new(target).unwrap();
        let w: Vec<f64> = ens
            .trajectories
            .iter()
            .map(|t| girsanov_reweight(t, &target).unwrap())
            .collect();
        let m = mean_estimate(&w).unwrap();
        assert!(m.within_se(1.0, 3.0), "{target:?}: {m:?}");
    }
}

#[test]
fn girsanov_rejects_drifted_reference() {
    let d = DriftSpec::atlas(2, 1.0).unwrap();
    let cfg = StepConfig::new(1e-2, 0.1);
    let t = run_finite(&[0.0, 1.0], &d, &cfg, &mut replica_rng(1, 0)).unwrap();
    assert!(girsanov_reweight(&t, &d).is_err());
}

#[test]
fn center_of_mass_and_rank_martingales() {
    let d = DriftSpec::atlas(3, 1.0).unwrap();
    let cfg = StepConfig::new(1e-3, 1.0)
        .endpoints_only()
        .without_occupation();
    let ens = run_ensemble(6, 2000, &d, &cfg, stationary_init(&d)).unwrap();
    let com = center_of_mass_checks(&ens.trajectories, &d).unwrap();
    assert!(com.pass(), "{com:?}");
    let beta = rank_martingale_checks(&ens.trajectories, &d).unwrap();
    assert!(beta.pass(), "{beta:?}");
    assert!(center_of_mass_checks(&ens.trajectories[..100], &d).is_err());
}

#[test]
fn driftless_pair_rank_martingales() {
    let d = DriftSpec::zeros(2).unwrap();
    let cfg = StepConfig::new(1e-3, 1.0)
        .endpoints_only()
        .without_occupation();
    let ens = run_ensemble(7, 1000, &d, &cfg, |_| vec![0.0, 0.0]).unwrap();
    let beta = rank_martingale_checks(&ens.trajectories, &d).unwrap();
    assert!(beta.pass(), "{beta:?}");
}

fn lagged(seed: u64, stationary: bool) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = DriftSpec::atlas(3, 1.0).unwrap();
    let cfg = StepConfig::new(1e-3, 0.5)
        .endpoints_only()
        .without_occupation();
    let law = stationary_spacing_law(&compute_alphas(&d)).unwrap();
    let ens = run_ensemble(seed, 4000, &d, &cfg, |rng| {
        if stationary {
            sample_centered_stationary(&law, rng).positions
        } else {
            vec![0.0, 0.0, 0.0]
        }
    })
    .unwrap();
    let earlier = ens
        .trajectories
        .iter()
        .map(|t| t.initial().spacings.clone())
        .collect();
    let later = ens
        .trajectories
        .iter()
        .map(|t| t.terminal().spacings.clone())
        .collect();
    (earlier, later)
}

#[test]
fn reversal_test_accepts_equilibrium_and_detects_relaxation() {
    let (e, l) = lagged(8, true);
    let report = time_reversal_test(&e, &l, 0.01).unwrap();
    assert!(!report.reject(), "{report:?}");
    let (e, l) = lagged(9, false);
    assert!(time_reversal_test(&e, &l, 0.01).unwrap().reject());
}

#[test]
fn single_particle_is_a_drifting_brownian_motion() {
    let d = DriftSpec::single_particle(0.7).unwrap();
    let cfg = StepConfig::new(1e-2, 1.0).endpoints_only();
    let ens = run_ensemble(10, 4000, &d, &cfg, |_| vec![0.0]).unwrap();
    let x: Vec<f64> = ens
        .trajectories
        .iter()
        .map(|t| t.terminal().positions[0])
        .collect();
    let m = mean_estimate(&x).unwrap();
    assert!(m.within_se(0.7, 3.0), "{m:?}");
    assert!(ens.trajectories[0].terminal().spacings.is_empty());
}

#[test]
fn f32_simulation_runs() {
    let d = DriftSpec::<f32>::atlas(3, 1.0).unwrap();
    let cfg = StepConfig::new(1e-3f32, 0.5).record_every(100);
    let t: atlas_core::Trajectory32 =
        run_finite(&[0.0, 0.5, 1.0], &d, &cfg, &mut replica_rng(3, 0)).unwrap();
    assert_eq!(t.samples.len(), 6);
    assert!(t.terminal().spacings.iter().all(|&s| s >= 0.0));
}
