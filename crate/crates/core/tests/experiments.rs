use bp_lab::circuits::ParamRange;
use bp_lab::experiments::{
    run_noise_study, run_training, run_variance_sweep, TrainingConfig, VarianceSweepConfig,
};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn small_sweep(seed: u64) -> VarianceSweepConfig {
    VarianceSweepConfig {
        qubit_counts: vec![3, 5, 7],
        samples_per_point: 40,
        base_seed: seed,
        ..Default::default()
    }
}

#[test]
fn sweep_is_a_pure_function_of_its_config() {
    let a = in_pool(1, || run_variance_sweep(&small_sweep(5)).unwrap());
    let b = in_pool(3, || run_variance_sweep(&small_sweep(5)).unwrap());
    assert_eq!(a, b);
    let c = run_variance_sweep(&small_sweep(6)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn sweep_variances_are_positive() {
    let res = run_variance_sweep(&small_sweep(11)).unwrap();
    assert_eq!(res.len(), 15);
    for r in &res {
        assert!(r.variance > 0.0, "{r:?}");
        assert_eq!(r.sample_count, 40);
    }
}

#[test]
fn range_results_do_not_depend_on_which_other_ranges_run() {
    let all = run_variance_sweep(&small_sweep(2)).unwrap();
    let only_r4 = VarianceSweepConfig { ranges: vec![ParamRange::R4], ..small_sweep(2) };
    let sub = run_variance_sweep(&only_r4).unwrap();
    let from_all: Vec<_> = all.into_iter().filter(|r| r.range == ParamRange::R4).collect();
    assert_eq!(sub, from_all);
}

#[test]
fn training_is_deterministic_and_bounded() {
    let config = TrainingConfig {
        qubit_counts: vec![4],
        steps: 12,
        runs: 4,
        ranges: vec![ParamRange::R1, ParamRange::R5],
        base_seed: 3,
        ..Default::default()
    };
    let a = in_pool(1, || run_training(&config).unwrap());
    let b = in_pool(4, || run_training(&config).unwrap());
    assert_eq!(a, b);
    for tr in &a {
        assert_eq!(tr.mean_costs.len(), 12);
        assert!(tr.per_run_costs.iter().flatten().all(|c| (0.0..=1.0).contains(c)));
    }
}

#[test]
fn small_circuits_train() {
    let config = TrainingConfig {
        qubit_counts: vec![5],
        ranges: ParamRange::ALL.to_vec(),
        runs: 3,
        base_seed: 9,
        ..Default::default()
    };
    for tr in run_training(&config).unwrap() {
        assert!(tr.final_mean_cost() < 0.1, "{} {}", tr.range, tr.final_mean_cost());
    }
}

#[test]
fn noise_study_runs_differ() {
    let config = TrainingConfig {
        qubit_counts: vec![4],
        steps: 10,
        runs: 3,
        ranges: vec![ParamRange::R3],
        shots: Some(100),
        ..Default::default()
    };
    let runs = run_noise_study(&config).unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(runs.iter().map(|r| r.run_index).collect::<Vec<_>>(), vec![0, 1, 2]);
    assert_ne!(runs[0].costs, runs[1].costs);
    assert_ne!(runs[1].costs, runs[2].costs);
}
