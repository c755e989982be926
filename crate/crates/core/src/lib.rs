//! Statevector simulation and experiment harness for measuring how the
//! interval used to draw random initial parameters affects gradient decay
//! (barren plateaus) and trainability of parameterised quantum circuits.
//!
//! Layout:
//! - [`statevector`]: dense amplitudes, gates, Z-parity expectations, sampling
//! - [`circuits`]: the two circuit families and the five initialisation ranges
//! - [`gradients`]: parameter-shift gradients and a finite-difference oracle
//! - [`optim`]: Adam with bias correction
//! - [`experiments`]: variance sweep with slope fits, training and noise studies
//! - [`cli`]: config files, CSV/JSON output, exit codes

pub mod circuits;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod gradients;
pub mod optim;
pub mod statevector;

pub use error::{Error, Result};
