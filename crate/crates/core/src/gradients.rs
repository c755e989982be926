//! Analytic gradients by the parameter-shift rule, plus a central
//! finite-difference oracle.
//!
//! Every rotation is `exp(-i θ σ / 2)` with a Pauli generator, so for a single
//! gate occurrence `g` the exact derivative is
//! `½ [C(θ_g + π/2) − C(θ_g − π/2)]`. A slot shared by several gates gets the
//! sum over its occurrences (product rule), taken in gate order.
//!
//! Shifted circuits restart from cached intermediate states, so an occurrence
//! late in the circuit only replays the gates after its checkpoint.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::CircuitSpec;
use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Upper bound on memory held by cached intermediate states.
const CHECKPOINT_BUDGET_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    ParameterShift,
    FiniteDifference,
}

/// ∂C/∂θₖ for every parameter slot.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    pub values: Vec<f64>,
    pub method: GradientMethod,
}

impl GradientVector {
    fn new(values: Vec<f64>, method: GradientMethod) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {k} is {}", values[k])));
        }
        Ok(Self { values, method })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which circuit a measurement callback is being asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    /// The unshifted circuit.
    Base,
    /// Gate `gate` with its angle moved by +π/2 (`plus`) or −π/2.
    Shifted { gate: usize, plus: bool },
}

impl Evaluation {
    /// Dense index: 0 for `Base`, then `1 + 2·gate (+1 for the minus shift)`.
    pub fn index(self) -> u64 {
        match self {
            Evaluation::Base => 0,
            Evaluation::Shifted { gate, plus } => 1 + 2 * gate as u64 + u64::from(!plus),
        }
    }
}

/// Forward pass with cached states every `stride` gates.
struct Checkpoints<'a> {
    circuit: &'a CircuitSpec,
    params: &'a [f64],
    stride: usize,
    states: Vec<StateVector>,
    last: StateVector,
}

impl<'a> Checkpoints<'a> {
    fn record(circuit: &'a CircuitSpec, params: &'a [f64]) -> Result<Self> {
        circuit.check_params(params)?;
        let mut state = StateVector::new_zero_state(circuit.n_qubits())?;
        let n_gates = circuit.gates().len();
        let state_bytes = state.dim() * std::mem::size_of::<num_complex::Complex64>();
        let max_states = (CHECKPOINT_BUDGET_BYTES / state_bytes).max(1);
        let stride = n_gates.div_ceil(max_states).max(1);

        let mut states = Vec::with_capacity(n_gates.div_ceil(stride));
        let mut at = 0;
        while at < n_gates {
            states.push(state.clone());
            let next = (at + stride).min(n_gates);
            circuit.apply_span(&mut state, params, at, next, None);
            at = next;
        }
        Ok(Self { circuit, params, stride, states, last: state })
    }

    /// Final state with the angle of gate `gate` moved by `delta`.
    fn shifted(&self, gate: usize, delta: f64) -> StateVector {
        let block = gate / self.stride;
        let start = block * self.stride;
        let mut state = self.states[block].clone();
        let n_gates = self.circuit.gates().len();
        self.circuit.apply_span(&mut state, self.params, start, gate, None);
        self.circuit.apply_span(&mut state, self.params, gate, n_gates, Some((gate, delta)));
        state
    }
}

/// Parameter-shift derivatives for `slots`, with a caller-supplied read-out.
///
/// Returns the read-out of the unshifted circuit together with one derivative
/// per requested slot. `measure` is called once per evaluated circuit; calls
/// may run concurrently but the reduction order is fixed by gate index.
pub fn parameter_shift_with<F>(
    circuit: &CircuitSpec,
    params: &[f64],
    slots: &[usize],
    measure: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&StateVector, Evaluation) -> Result<f64> + Sync,
{
    if let Some(&bad) = slots.iter().find(|&&s| s >= circuit.n_params()) {
        return Err(Error::InvalidArgument(format!(
            "slot {bad} out of range for {} parameters",
            circuit.n_params()
        )));
    }
    let cache = Checkpoints::record(circuit, params)?;
    let base = measure(&cache.last, Evaluation::Base)?;

    let per_slot: Vec<Vec<usize>> = slots.iter().map(|&s| circuit.occurrences(s)).collect();
    let jobs: Vec<(usize, bool)> = per_slot
        .iter()
        .flatten()
        .flat_map(|&g| [(g, true), (g, false)])
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(gate, plus)| {
            let delta = if plus { FRAC_PI_2 } else { -FRAC_PI_2 };
            measure(&cache.shifted(gate, delta), Evaluation::Shifted { gate, plus })
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut pairs = values.chunks_exact(2);
    let grads = per_slot
        .iter()
        .map(|occ| {
            occ.iter()
                .map(|_| {
                    let pair = pairs.next().expect("two evaluations per occurrence");
                    0.5 * (pair[0] - pair[1])
                })
                .sum()
        })
        .collect();
    Ok((base, grads))
}

/// C(θ) and ∇C(θ) for a Z-parity observable, exact expectations.
pub fn value_and_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    observable: &[usize],
) -> Result<(f64, GradientVector)> {
    let slots: Vec<usize> = (0..circuit.n_params()).collect();
    let (value, grads) =
        parameter_shift_with(circuit, params, &slots, |s, _| s.expval_pauli_z(observable))?;
    Ok((value, GradientVector::new(grads, GradientMethod::ParameterShift)?))
}

pub fn parameter_shift_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    observable: &[usize],
) -> Result<GradientVector> {
    value_and_gradient(circuit, params, observable).map(|(_, g)| g)
}

/// ∂C/∂θ for the final parameter slot only.
pub fn last_param_gradient(circuit: &CircuitSpec, params: &[f64], observable: &[usize]) -> Result<f64> {
    let last = circuit.n_params().checked_sub(1).ok_or_else(|| {
        Error::InvalidArgument("circuit has no parameters".into())
    })?;
    let (_, grads) =
        parameter_shift_with(circuit, params, &[last], |s, _| s.expval_pauli_z(observable))?;
    let g = grads[0];
    if !g.is_finite() {
        return Err(Error::NonFinite(format!("last-parameter gradient is {g}")));
    }
    Ok(g)
}

/// Central differences `[C(θ + h·eₖ) − C(θ − h·eₖ)] / 2h`, shifting every
/// occurrence of slot `k` together.
pub fn finite_difference_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    observable: &[usize],
    h: f64,
) -> Result<GradientVector> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} outside (0, 1e-3]")));
    }
    circuit.check_params(params)?;
    let values = (0..circuit.n_params())
        .into_par_iter()
        .map(|k| {
            let mut shifted = params.to_vec();
            shifted[k] = params[k] + h;
            let plus = circuit.evaluate(&shifted, observable)?;
            shifted[k] = params[k] - h;
            let minus = circuit.evaluate(&shifted, observable)?;
            Ok((plus - minus) / (2.0 * h))
        })
        .collect::<Result<Vec<f64>>>()?;
    GradientVector::new(values, GradientMethod::FiniteDifference)
}
