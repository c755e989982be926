mod common;

use bp_lab::circuits::{build_alternating_ansatz, build_random_bp_circuit, RotationAxis};
use bp_lab::statevector::{GateOp, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn kernels_match_dense_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=5 {
        for _ in 0..5 {
            let circuit = common::random_circuit(&mut rng, n, 30, 4);
            let params: Vec<f64> = (0..4).map(|_| rng.gen_range(-7.0..7.0)).collect();
            let fast = circuit.simulate(&params).unwrap();
            let dense = common::dense_simulate(&circuit, &params);
            assert!(max_diff(fast.amplitudes(), &dense) < 1e-12, "n = {n}");
        }
    }
}

#[test]
fn expval_matches_dense_observable() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=6 {
        let circuit = common::random_circuit(&mut rng, n, 40, 5);
        let params: Vec<f64> = (0..5).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let state = circuit.simulate(&params).unwrap();
        for _ in 0..8 {
            let mut qubits: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if qubits.is_empty() {
                qubits.push(rng.gen_range(0..n));
            }
            let brute = common::dense_expval(&common::dense_z_observable(n, &qubits), state.amplitudes());
            let fast = state.expval_pauli_z(&qubits).unwrap();
            assert!((fast - brute).abs() < 1e-12, "n = {n}, qubits {qubits:?}: {fast} vs {brute}");
        }
    }
}

#[test]
fn sampling_error_shrinks_like_inverse_sqrt_shots() {
    // RY(1.1)|0⟩: ⟨Z⟩ = cos 1.1. Mean absolute error over 40 seeds per shot count.
    let mut state = StateVector::new_zero_state(1).unwrap();
    state.apply_gate(&GateOp::ry(0, 0), Some(1.1)).unwrap();
    let exact = state.expval_pauli_z(&[0]).unwrap();
    let err = |shots: u64| {
        (0..40u64)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + s);
                (state.sample_expval_z(&[0], shots, &mut rng).unwrap() - exact).abs()
            })
            .sum::<f64>()
            / 40.0
    };
    let (e1, e4) = (err(2_500), err(10_000));
    let ratio = e1 / e4;
    assert!((1.0..=4.0).contains(&ratio), "4x shots changed error by {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_is_conserved(seed in any::<u64>(), n in 1usize..=15, n_gates in 1usize..=200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = common::random_circuit(&mut rng, n, n_gates, 1.max(n_gates / 4));
        let params: Vec<f64> = (0..circuit.n_params()).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let state = circuit.simulate(&params).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        let p: f64 = state.probabilities().iter().sum();
        prop_assert!((p - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ry_inverse_restores_state(seed in any::<u64>(), theta in -10.0f64..10.0, target in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = common::random_circuit(&mut rng, 4, 20, 3);
        let mut state = circuit.simulate(&[0.3, -1.0, 2.2]).unwrap();
        let before = state.clone();
        state.apply_gate(&GateOp::ry(target, 0), Some(theta)).unwrap();
        state.apply_gate(&GateOp::ry(target, 0), Some(-theta)).unwrap();
        prop_assert!(max_diff(state.amplitudes(), before.amplitudes()) < 1e-12);
    }

    #[test]
    fn diagonal_gates_commute(seed in any::<u64>(), a in 0usize..4, b in 0usize..4, c in 0usize..4, theta in -7.0f64..7.0) {
        prop_assume!(b != c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = common::random_circuit(&mut rng, 4, 15, 2).simulate(&[0.9, -0.4]).unwrap();
        let rz = GateOp::rz(a, 0);
        let cz = GateOp::cz(b, c);
        let mut first = base.clone();
        first.apply_gate(&rz, Some(theta)).unwrap();
        first.apply_gate(&cz, None).unwrap();
        let mut second = base;
        second.apply_gate(&cz, None).unwrap();
        second.apply_gate(&rz, Some(theta)).unwrap();
        prop_assert!(max_diff(first.amplitudes(), second.amplitudes()) < 1e-12);
    }

    #[test]
    fn expval_stays_in_unit_interval(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axes: Vec<RotationAxis> = (0..n).map(|_| RotationAxis::random(&mut rng)).collect();
        let c1 = build_random_bp_circuit(n, &axes, 2).unwrap();
        let c2 = build_alternating_ansatz(n, 2).unwrap();
        for c in [c1, c2] {
            let params: Vec<f64> = (0..c.n_params()).map(|_| rng.gen_range(-7.0..7.0)).collect();
            let all: Vec<usize> = (0..n).collect();
            let e = c.evaluate(&params, &all).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e));
        }
    }
}
