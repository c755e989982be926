//! Dense statevector simulation.
//!
//! Amplitude index `i` is the computational basis state |i⟩ with qubit 0 as
//! the most significant bit, so qubit `q` of an `n`-qubit register lives at
//! bit position `n - 1 - q`. Gates are applied in place by pairing amplitudes
//! whose indices differ only in the target bit; no dense operator is ever
//! materialised.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the simulator will allocate (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Pauli generator of a single-qubit rotation `exp(-i θ σ / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RotationAxis {
    X,
    Y,
    Z,
}

impl RotationAxis {
    pub const ALL: [RotationAxis; 3] = [RotationAxis::X, RotationAxis::Y, RotationAxis::Z];

    /// Uniform draw from {X, Y, Z}.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.gen_range(0..3)]
    }
}

/// A single gate placed on specific qubits.
///
/// Rotations carry the index of the parameter slot they read their angle
/// from; several gates may share a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub enum GateOp {
    Rotation {
        axis: RotationAxis,
        target: usize,
        param_slot: usize,
    },
    Cz {
        control: usize,
        target: usize,
    },
}

impl GateOp {
    pub fn rx(target: usize, param_slot: usize) -> Self {
        GateOp::Rotation { axis: RotationAxis::X, target, param_slot }
    }

    pub fn ry(target: usize, param_slot: usize) -> Self {
        GateOp::Rotation { axis: RotationAxis::Y, target, param_slot }
    }

    pub fn rz(target: usize, param_slot: usize) -> Self {
        GateOp::Rotation { axis: RotationAxis::Z, target, param_slot }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        GateOp::Cz { control, target }
    }

    pub fn param_slot(&self) -> Option<usize> {
        match *self {
            GateOp::Rotation { param_slot, .. } => Some(param_slot),
            GateOp::Cz { .. } => None,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            GateOp::Rotation { target, .. } | GateOp::Cz { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            GateOp::Rotation { .. } => None,
            GateOp::Cz { control, .. } => Some(control),
        }
    }

    /// Checks the gate's qubit indices against a register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { index: q, n_qubits })
            }
        };
        check(self.target())?;
        if let Some(control) = self.control() {
            check(control)?;
            if control == self.target() {
                return Err(Error::InvalidGate(format!("CZ control and target are both qubit {control}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Rotation { axis, target, param_slot } => {
                write!(f, "R{axis:?}(θ[{param_slot}]) q{target}")
            }
            GateOp::Cz { control, target } => write!(f, "CZ q{control},q{target}"),
        }
    }
}

/// Flat on-disk form of a gate: `{"kind", "target", "control", "param_slot"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRecord {
    pub kind: String,
    pub target: usize,
    pub control: Option<usize>,
    pub param_slot: Option<usize>,
}

impl From<GateOp> for GateRecord {
    fn from(gate: GateOp) -> Self {
        match gate {
            GateOp::Rotation { axis, target, param_slot } => GateRecord {
                kind: format!("R{axis:?}"),
                target,
                control: None,
                param_slot: Some(param_slot),
            },
            GateOp::Cz { control, target } => GateRecord {
                kind: "CZ".to_string(),
                target,
                control: Some(control),
                param_slot: None,
            },
        }
    }
}

impl TryFrom<GateRecord> for GateOp {
    type Error = Error;

    fn try_from(rec: GateRecord) -> Result<Self> {
        let axis = match rec.kind.as_str() {
            "RX" => Some(RotationAxis::X),
            "RY" => Some(RotationAxis::Y),
            "RZ" => Some(RotationAxis::Z),
            "CZ" => None,
            other => return Err(Error::InvalidGate(format!("unknown gate kind {other:?}"))),
        };
        match (axis, rec.control, rec.param_slot) {
            (Some(axis), None, Some(param_slot)) => {
                Ok(GateOp::Rotation { axis, target: rec.target, param_slot })
            }
            (None, Some(control), None) if control != rec.target => {
                Ok(GateOp::Cz { control, target: rec.target })
            }
            _ => Err(Error::InvalidGate(format!(
                "{} with control {:?} and param_slot {:?}",
                rec.kind, rec.control, rec.param_slot
            ))),
        }
    }
}

/// Dense complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn new_zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity { n_qubits, max: MAX_QUBITS });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The vector is not renormalised.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity { n_qubits, max: MAX_QUBITS });
        }
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes supplied for {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Σ |aᵢ|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Resets to |0…0⟩ without reallocating.
    pub fn reset(&mut self) {
        self.amplitudes.fill(Complex64::new(0.0, 0.0));
        self.amplitudes[0] = Complex64::new(1.0, 0.0);
    }

    fn stride(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies `gate`; `theta` must be present exactly when the gate is a rotation.
    pub fn apply_gate(&mut self, gate: &GateOp, theta: Option<f64>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match (*gate, theta) {
            (GateOp::Rotation { axis, target, .. }, Some(theta)) => {
                self.apply_rotation(axis, target, theta);
                Ok(())
            }
            (GateOp::Cz { control, target }, None) => {
                self.apply_cz(control, target);
                Ok(())
            }
            (GateOp::Rotation { .. }, None) => {
                Err(Error::InvalidGate(format!("{gate} needs an angle")))
            }
            (GateOp::Cz { .. }, Some(_)) => {
                Err(Error::InvalidGate(format!("{gate} takes no angle")))
            }
        }
    }

    /// `exp(-i θ σ / 2)` on `target`. Indices are not re-validated.
    pub(crate) fn apply_rotation(&mut self, axis: RotationAxis, target: usize, theta: f64) {
        let stride = self.stride(target);
        let (s, c) = (0.5 * theta).sin_cos();
        let blocks = self.amplitudes.chunks_exact_mut(2 * stride);
        match axis {
            RotationAxis::X => {
                for block in blocks {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x0, x1) = (*a0, *a1);
                        // -i·s·z = s·(z.im, -z.re)
                        *a0 = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
                        *a1 = Complex64::new(c * x1.re + s * x0.im, c * x1.im - s * x0.re);
                    }
                }
            }
            RotationAxis::Y => {
                for block in blocks {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x0, x1) = (*a0, *a1);
                        *a0 = x0 * c - x1 * s;
                        *a1 = x0 * s + x1 * c;
                    }
                }
            }
            RotationAxis::Z => {
                let phase0 = Complex64::new(c, -s);
                let phase1 = Complex64::new(c, s);
                for block in blocks {
                    let (lo, hi) = block.split_at_mut(stride);
                    lo.iter_mut().for_each(|a| *a *= phase0);
                    hi.iter_mut().for_each(|a| *a *= phase1);
                }
            }
        }
    }

    pub(crate) fn apply_cz(&mut self, control: usize, target: usize) {
        let mask = self.stride(control) | self.stride(target);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
    }

    fn parity_mask(&self, qubits: &[usize]) -> Result<usize> {
        if qubits.is_empty() {
            return Err(Error::EmptyObservable);
        }
        qubits.iter().try_fold(0usize, |mask, &q| {
            if q < self.n_qubits {
                Ok(mask | self.stride(q))
            } else {
                Err(Error::QubitIndex { index: q, n_qubits: self.n_qubits })
            }
        })
    }

    /// ⟨ψ| Z⊗…⊗Z |ψ⟩ with Z on each listed qubit. Duplicate indices act once.
    pub fn expval_pauli_z(&self, qubits: &[usize]) -> Result<f64> {
        let mask = self.parity_mask(qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| parity_sign(i, mask) * a.norm_sqr())
            .sum())
    }

    /// Born-rule probabilities |⟨i|ψ⟩|².
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Estimates the Z-parity expectation from `shots` basis-state samples.
    pub fn sample_expval_z<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: u64,
        rng: &mut R,
    ) -> Result<f64> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mask = self.parity_mask(qubits)?;
        let cdf: Vec<f64> = self
            .amplitudes
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.norm_sqr();
                Some(*acc)
            })
            .collect();
        let total = *cdf.last().expect("register is never empty");
        let last = cdf.len() - 1;
        let mut sum = 0i64;
        for _ in 0..shots {
            let u = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(last);
            sum += if (idx & mask).count_ones() % 2 == 0 { 1 } else { -1 };
        }
        Ok(sum as f64 / shots as f64)
    }
}

#[inline]
fn parity_sign(index: usize, mask: usize) -> f64 {
    if (index & mask).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}
