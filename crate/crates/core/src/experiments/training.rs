use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::circuits::{build_alternating_ansatz, draw_params, CircuitSpec, ParamRange};
use crate::error::{Error, Result};
use crate::gradients::{parameter_shift_with, value_and_gradient};
use crate::optim::AdamState;

/// The cost reads ⟨Z₀⟩.
const OBSERVABLE: [usize; 1] = [0];

fn default_layers() -> usize {
    2
}

fn default_steps() -> usize {
    50
}

fn default_runs() -> usize {
    10
}

fn default_learning_rate() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub qubit_counts: Vec<usize>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    pub ranges: Vec<ParamRange>,
    /// Shots per recorded cost read-out; `None` records exact expectations.
    #[serde(default)]
    pub shots: Option<u64>,
    /// Also estimate the gradient's expectation values from `shots` samples.
    #[serde(default)]
    pub noisy_gradients: bool,
    #[serde(default)]
    pub base_seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            qubit_counts: vec![5, 10, 15, 20],
            layers: default_layers(),
            steps: default_steps(),
            runs: default_runs(),
            learning_rate: default_learning_rate(),
            ranges: ParamRange::ALL.to_vec(),
            shots: None,
            noisy_gradients: false,
            base_seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qubit_counts.is_empty() {
            return Err(Error::Config("qubit_counts must not be empty".into()));
        }
        if let Some(n) = self.qubit_counts.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("qubit_counts: the ansatz needs at least 2 qubits, got {n}")));
        }
        if self.ranges.is_empty() {
            return Err(Error::Config("ranges must not be empty".into()));
        }
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.noisy_gradients && self.shots.is_none() {
            return Err(Error::Config("noisy_gradients requires shots".into()));
        }
        Ok(())
    }
}

/// Test hooks for training; the default reproduces the normal experiment.
#[derive(Debug, Clone, Default)]
pub struct TrainingOptions {
    /// Start every run from θ = 0 instead of a random draw.
    pub zero_init: bool,
    /// Give every run the seed of run 0.
    pub fixed_run_seed: bool,
}

/// Cost after each optimisation step of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub range: ParamRange,
    pub qubit_count: usize,
    pub run_index: usize,
    pub costs: Vec<f64>,
}

/// All runs of one `(range, n)` point and their step-wise mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub range: ParamRange,
    pub qubit_count: usize,
    pub per_run_costs: Vec<Vec<f64>>,
    pub mean_costs: Vec<f64>,
}

impl TrainingTrace {
    fn from_runs(range: ParamRange, qubit_count: usize, runs: Vec<RunTrace>) -> Self {
        let per_run_costs: Vec<Vec<f64>> = runs.into_iter().map(|r| r.costs).collect();
        let steps = per_run_costs.first().map_or(0, Vec::len);
        let count = per_run_costs.len() as f64;
        let mean_costs = (0..steps)
            .map(|t| per_run_costs.iter().map(|run| run[t]).sum::<f64>() / count)
            .collect();
        Self { range, qubit_count, per_run_costs, mean_costs }
    }

    pub fn final_mean_cost(&self) -> f64 {
        *self.mean_costs.last().expect("at least one step")
    }
}

fn identity_cost(expectation: f64) -> f64 {
    (1.0 - expectation * expectation).max(0.0)
}

struct Run<'a> {
    circuit: &'a CircuitSpec,
    range: ParamRange,
    config: &'a TrainingConfig,
    seed: u64,
    run_index: usize,
}

impl Run<'_> {
    fn execute(&self, options: &TrainingOptions) -> Result<Vec<f64>> {
        let n_params = self.circuit.n_params();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut params = if options.zero_init {
            vec![0.0; n_params]
        } else {
            draw_params(&self.range, n_params, &mut rng)
        };
        let mut adam = AdamState::new(n_params, self.config.learning_rate);
        let mut costs = Vec::with_capacity(self.config.steps);

        for step in 0..self.config.steps {
            let (expectation, grad_e) = self.expectation_and_gradient(&params, step)?;
            // d/dθ (1 − E²) = −2E ∇E
            let grad: Vec<f64> = grad_e.iter().map(|g| -2.0 * expectation * g).collect();
            adam.step(&mut params, &grad).map_err(|e| self.locate(step, e))?;

            let state = self.circuit.simulate(&params)?;
            let readout = match self.config.shots {
                Some(shots) => state.sample_expval_z(&OBSERVABLE, shots, &mut rng)?,
                None => state.expval_pauli_z(&OBSERVABLE)?,
            };
            let cost = identity_cost(readout);
            if !cost.is_finite() {
                return Err(self.locate(step, Error::NonFinite(format!("cost {cost}"))));
            }
            costs.push(cost);
        }
        Ok(costs)
    }

    fn expectation_and_gradient(&self, params: &[f64], step: usize) -> Result<(f64, Vec<f64>)> {
        match self.config.shots {
            Some(shots) if self.config.noisy_gradients => {
                let slots: Vec<usize> = (0..self.circuit.n_params()).collect();
                let step_seed = derive_seed(self.seed, 0, step, 0);
                parameter_shift_with(self.circuit, params, &slots, |state, eval| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(step_seed, 1, 0, eval.index()));
                    state.sample_expval_z(&OBSERVABLE, shots, &mut rng)
                })
            }
            _ => {
                let (e, g) = value_and_gradient(self.circuit, params, &OBSERVABLE)?;
                Ok((e, g.values))
            }
        }
    }

    fn locate(&self, step: usize, err: Error) -> Error {
        match err {
            Error::NonFinite(msg) => Error::NonFinite(format!(
                "{} n = {} run {} step {}: {msg}",
                self.range.label,
                self.circuit.n_qubits(),
                self.run_index,
                step
            )),
            other => other,
        }
    }
}

/// Every run of every `(range, n)` point, unaveraged, in config order.
pub fn run_training_runs(config: &TrainingConfig, options: &TrainingOptions) -> Result<Vec<RunTrace>> {
    config.validate()?;
    let mut traces = Vec::new();
    for range in &config.ranges {
        for &n in &config.qubit_counts {
            let circuit = build_alternating_ansatz(n, config.layers)?;
            let runs = (0..config.runs)
                .into_par_iter()
                .map(|run_index| {
                    let index = if options.fixed_run_seed { 0 } else { run_index as u64 };
                    let run = Run {
                        circuit: &circuit,
                        range: *range,
                        config,
                        seed: derive_seed(config.base_seed, range.label.index(), n, index),
                        run_index,
                    };
                    Ok(RunTrace {
                        range: *range,
                        qubit_count: n,
                        run_index,
                        costs: run.execute(options)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            traces.extend(runs);
        }
    }
    Ok(traces)
}

pub fn run_training_with(config: &TrainingConfig, options: &TrainingOptions) -> Result<Vec<TrainingTrace>> {
    let runs = run_training_runs(config, options)?;
    let mut out: Vec<TrainingTrace> = Vec::new();
    for chunk in runs.chunks(config.runs) {
        out.push(TrainingTrace::from_runs(chunk[0].range, chunk[0].qubit_count, chunk.to_vec()));
    }
    Ok(out)
}

/// Averaged training curves for each `(range, n)` in the config.
pub fn run_training(config: &TrainingConfig) -> Result<Vec<TrainingTrace>> {
    run_training_with(config, &TrainingOptions::default())
}

/// Per-run curves with finite-shot cost read-out; `shots` must be set.
pub fn run_noise_study(config: &TrainingConfig) -> Result<Vec<RunTrace>> {
    if config.shots.is_none() {
        return Err(Error::Config("missing field `shots`: the noise study needs a shot count".into()));
    }
    run_training_runs(config, &TrainingOptions::default())
}
