//! Dense-matrix reference implementation used as an independent oracle.
//!
//! Operators are built as explicit 2ⁿ×2ⁿ Kronecker products with qubit 0 as
//! the leftmost factor, so nothing here shares code with the stride-based
//! kernels under test.

#![allow(dead_code)]

use bp_lab::circuits::{CircuitSpec, RotationAxis};
use bp_lab::statevector::GateOp;
use num_complex::Complex64 as C;
use rand::seq::SliceRandom;
use rand::Rng;

pub type Matrix = Vec<Vec<C>>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn rotation(axis: RotationAxis, theta: f64) -> Matrix {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match axis {
        RotationAxis::X => vec![vec![c(cs, 0.0), c(0.0, -sn)], vec![c(0.0, -sn), c(cs, 0.0)]],
        RotationAxis::Y => vec![vec![c(cs, 0.0), c(-sn, 0.0)], vec![c(sn, 0.0), c(cs, 0.0)]],
        RotationAxis::Z => vec![
            vec![C::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), C::from_polar(1.0, theta / 2.0)],
        ],
    }
}

pub fn pauli_z() -> Matrix {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

fn projector(bit: usize) -> Matrix {
    let mut p = vec![vec![c(0.0, 0.0); 2]; 2];
    p[bit][bit] = c(1.0, 0.0);
    p
}

/// ⊗ over qubits 0..n of `factor(q)`.
pub fn kron_chain(n: usize, factor: impl Fn(usize) -> Matrix) -> Matrix {
    (1..n).fold(factor(0), |acc, q| kron(&acc, &factor(q)))
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
}

/// Full unitary of one gate on an n-qubit register.
pub fn dense_gate(n: usize, gate: &GateOp, theta: f64) -> Matrix {
    match *gate {
        GateOp::Rotation { axis, target, .. } => {
            kron_chain(n, |q| if q == target { rotation(axis, theta) } else { identity(2) })
        }
        GateOp::Cz { control, target } => {
            // |0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ Z_t
            let off = kron_chain(n, |q| if q == control { projector(0) } else { identity(2) });
            let on = kron_chain(n, |q| {
                if q == control {
                    projector(1)
                } else if q == target {
                    pauli_z()
                } else {
                    identity(2)
                }
            });
            add(&off, &on)
        }
    }
}

pub fn matvec(m: &Matrix, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dense_z_observable(n: usize, qubits: &[usize]) -> Matrix {
    kron_chain(n, |q| if qubits.contains(&q) { pauli_z() } else { identity(2) })
}

/// ⟨ψ|O|ψ⟩ by explicit matrix-vector product.
pub fn dense_expval(observable: &Matrix, psi: &[C]) -> f64 {
    let o_psi = matvec(observable, psi);
    psi.iter().zip(&o_psi).map(|(a, b)| a.conj() * b).sum::<C>().re
}

/// Simulates a circuit with dense unitaries.
pub fn dense_simulate(circuit: &CircuitSpec, params: &[f64]) -> Vec<C> {
    let dim = 1 << circuit.n_qubits();
    let mut psi = vec![c(0.0, 0.0); dim];
    psi[0] = c(1.0, 0.0);
    for gate in circuit.gates() {
        let theta = gate.param_slot().map_or(0.0, |s| params[s]);
        psi = matvec(&dense_gate(circuit.n_qubits(), gate, theta), &psi);
    }
    psi
}

/// Random gate list over `n` qubits reading from `n_params` slots, each slot used at least once.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, n_gates: usize, n_params: usize) -> CircuitSpec {
    let mut gates: Vec<GateOp> = (0..n_params)
        .map(|s| GateOp::Rotation { axis: RotationAxis::random(rng), target: rng.gen_range(0..n), param_slot: s })
        .collect();
    while gates.len() < n_gates.max(n_params) {
        if n > 1 && rng.gen_bool(0.3) {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            gates.push(GateOp::cz(a, b));
        } else {
            gates.push(GateOp::Rotation {
                axis: RotationAxis::random(rng),
                target: rng.gen_range(0..n),
                param_slot: rng.gen_range(0..n_params),
            });
        }
    }
    gates.shuffle(rng);
    CircuitSpec::new(n, gates, n_params).unwrap()
}
