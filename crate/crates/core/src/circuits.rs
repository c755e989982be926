//! Parameterised circuit families and parameter initialisation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{GateOp, StateVector};

pub use crate::statevector::RotationAxis;

/// Identifier of one of the five initialisation intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RangeLabel {
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl RangeLabel {
    pub const ALL: [RangeLabel; 5] =
        [RangeLabel::R1, RangeLabel::R2, RangeLabel::R3, RangeLabel::R4, RangeLabel::R5];

    /// Position in R1..R5, used for seed derivation.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RangeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Uniform initialisation interval `[low, high)` in radians.
///
/// | label | interval |
/// |-------|----------|
/// | R1    | [0, 1]   |
/// | R2    | [−1, 1]  |
/// | R3    | [0, π]   |
/// | R4    | [−π, π]  |
/// | R5    | [0, 2π]  |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ParamRange {
    pub label: RangeLabel,
    pub low: f64,
    pub high: f64,
}

impl ParamRange {
    pub const R1: ParamRange = ParamRange { label: RangeLabel::R1, low: 0.0, high: 1.0 };
    pub const R2: ParamRange = ParamRange { label: RangeLabel::R2, low: -1.0, high: 1.0 };
    pub const R3: ParamRange = ParamRange { label: RangeLabel::R3, low: 0.0, high: PI };
    pub const R4: ParamRange = ParamRange { label: RangeLabel::R4, low: -PI, high: PI };
    pub const R5: ParamRange = ParamRange { label: RangeLabel::R5, low: 0.0, high: 2.0 * PI };

    pub const ALL: [ParamRange; 5] = [Self::R1, Self::R2, Self::R3, Self::R4, Self::R5];

    pub fn from_label(label: RangeLabel) -> Self {
        Self::ALL[label.index()]
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let label = match s.trim() {
            "R1" => RangeLabel::R1,
            "R2" => RangeLabel::R2,
            "R3" => RangeLabel::R3,
            "R4" => RangeLabel::R4,
            "R5" => RangeLabel::R5,
            other => {
                return Err(Error::Config(format!(
                    "unknown parameter range {other:?} (expected one of R1..R5)"
                )))
            }
        };
        Ok(Self::from_label(label))
    }
}

impl TryFrom<String> for ParamRange {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ParamRange> for String {
    fn from(r: ParamRange) -> Self {
        r.label.to_string()
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{:.4}, {:.4}]", self.label, self.low, self.high)
    }
}

/// `count` independent uniform draws from `range`.
pub fn draw_params<R: Rng + ?Sized>(range: &ParamRange, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(range.low..range.high)).collect()
}

/// An ordered gate list whose rotations read angles from a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord", into = "CircuitRecord")]
pub struct CircuitSpec {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<GateOp>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<GateOp>,
}

impl TryFrom<CircuitRecord> for CircuitSpec {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        CircuitSpec::new(r.n_qubits, r.gates, r.n_params)
    }
}

impl From<CircuitSpec> for CircuitRecord {
    fn from(c: CircuitSpec) -> Self {
        CircuitRecord { n_qubits: c.n_qubits, n_params: c.n_params, gates: c.gates }
    }
}

impl CircuitSpec {
    /// Validates qubit indices and parameter-slot coverage.
    pub fn new(n_qubits: usize, gates: Vec<GateOp>, n_params: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        let mut used = vec![false; n_params];
        for gate in &gates {
            gate.validate(n_qubits)?;
            if let Some(slot) = gate.param_slot() {
                *used.get_mut(slot).ok_or_else(|| {
                    Error::InvalidGate(format!("{gate} uses slot {slot} but n_params = {n_params}"))
                })? = true;
            }
        }
        if let Some(slot) = used.iter().position(|u| !u) {
            return Err(Error::InvalidArgument(format!("parameter slot {slot} is never used")));
        }
        Ok(Self { n_qubits, n_params, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    /// Indices into `gates()` of every rotation reading `slot`, in gate order.
    pub fn occurrences(&self, slot: usize) -> Vec<usize> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.param_slot() == Some(slot))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::ParamLength { expected: self.n_params, actual: params.len() });
        }
        Ok(())
    }

    /// Applies gates `[from, to)` to `state`, adding `shift` to the angle of
    /// the gate at index `shift.0` if given. Inputs are assumed validated.
    pub(crate) fn apply_span(
        &self,
        state: &mut StateVector,
        params: &[f64],
        from: usize,
        to: usize,
        shift: Option<(usize, f64)>,
    ) {
        for (offset, gate) in self.gates[from..to].iter().enumerate() {
            match *gate {
                GateOp::Rotation { axis, target, param_slot } => {
                    let mut theta = params[param_slot];
                    if let Some((at, delta)) = shift {
                        if at == from + offset {
                            theta += delta;
                        }
                    }
                    state.apply_rotation(axis, target, theta);
                }
                GateOp::Cz { control, target } => state.apply_cz(control, target),
            }
        }
    }

    /// Prepares |0…0⟩ and runs the whole circuit.
    pub fn simulate(&self, params: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let mut state = StateVector::new_zero_state(self.n_qubits)?;
        self.apply_span(&mut state, params, 0, self.gates.len(), None);
        Ok(state)
    }

    /// ⟨0|U(θ)† Z_S U(θ)|0⟩ for the qubit set `observable`.
    pub fn evaluate(&self, params: &[f64], observable: &[usize]) -> Result<f64> {
        self.simulate(params)?.expval_pauli_z(observable)
    }
}

/// `repetitions` copies of [rotation layer with the given axes, CZ ladder].
///
/// Qubit `j` reads parameter slot `j` in every repetition, so the circuit has
/// `n_qubits` parameters regardless of depth.
pub fn build_random_bp_circuit(
    n_qubits: usize,
    axes: &[RotationAxis],
    repetitions: usize,
) -> Result<CircuitSpec> {
    if axes.len() != n_qubits {
        return Err(Error::InvalidArgument(format!(
            "{} rotation axes given for {} qubits",
            axes.len(),
            n_qubits
        )));
    }
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
    }
    let mut gates = Vec::with_capacity(repetitions * (2 * n_qubits).saturating_sub(1));
    for _ in 0..repetitions {
        gates.extend(
            axes.iter()
                .enumerate()
                .map(|(q, &axis)| GateOp::Rotation { axis, target: q, param_slot: q }),
        );
        gates.extend(cz_ladder(0, n_qubits));
    }
    CircuitSpec::new(n_qubits, gates, n_qubits)
}

/// Alternating-layer ansatz used for the training experiments.
///
/// An initial RY layer, then per layer: CZ ladder over (0,1)…(n−2,n−1), RY
/// layer, offset CZ ladder over (1,2)…(n−2,n−1), RY layer. Every rotation
/// has its own slot, `n_qubits · (2·layers + 1)` in total.
pub fn build_alternating_ansatz(n_qubits: usize, layers: usize) -> Result<CircuitSpec> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "alternating ansatz needs at least 2 qubits, got {n_qubits}"
        )));
    }
    if layers == 0 {
        return Err(Error::InvalidArgument("alternating ansatz needs at least 1 layer".into()));
    }
    let mut gates = Vec::new();
    let mut slot = 0;
    let mut ry_layer = |gates: &mut Vec<GateOp>| {
        for q in 0..n_qubits {
            gates.push(GateOp::ry(q, slot));
            slot += 1;
        }
    };
    ry_layer(&mut gates);
    for _ in 0..layers {
        gates.extend(cz_ladder(0, n_qubits));
        ry_layer(&mut gates);
        gates.extend(cz_ladder(1, n_qubits));
        ry_layer(&mut gates);
    }
    CircuitSpec::new(n_qubits, gates, n_qubits * (2 * layers + 1))
}

fn cz_ladder(start: usize, n_qubits: usize) -> impl Iterator<Item = GateOp> {
    (start..n_qubits.saturating_sub(1)).map(|q| GateOp::cz(q, q + 1))
}
