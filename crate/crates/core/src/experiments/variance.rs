use std::f64::consts::LN_10;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::circuits::{build_random_bp_circuit, draw_params, ParamRange, RotationAxis};
use crate::error::{Error, Result};
use crate::gradients::last_param_gradient;

fn default_samples() -> usize {
    200
}

fn default_repetitions() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceSweepConfig {
    pub qubit_counts: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples_per_point: usize,
    #[serde(default = "all_ranges")]
    pub ranges: Vec<ParamRange>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
}

fn all_ranges() -> Vec<ParamRange> {
    ParamRange::ALL.to_vec()
}

impl Default for VarianceSweepConfig {
    /// 200 samples at 5, 7, …, 15 qubits over all five ranges, two repetitions.
    fn default() -> Self {
        Self {
            qubit_counts: vec![5, 7, 9, 11, 13, 15],
            samples_per_point: default_samples(),
            ranges: all_ranges(),
            repetitions: default_repetitions(),
            base_seed: 0,
        }
    }
}

impl VarianceSweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qubit_counts.is_empty() {
            return Err(Error::Config("qubit_counts must not be empty".into()));
        }
        if self.qubit_counts.contains(&0) {
            return Err(Error::Config("qubit_counts entries must be positive".into()));
        }
        if self.ranges.is_empty() {
            return Err(Error::Config("ranges must not be empty".into()));
        }
        if self.samples_per_point < 2 {
            return Err(Error::Config(format!(
                "samples_per_point must be at least 2, got {}",
                self.samples_per_point
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Test hooks for the sweep; the default reproduces the normal experiment.
#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Use this axis for every rotation instead of drawing one per qubit.
    pub axis_override: Option<RotationAxis>,
    /// Give every sample of a point the seed of sample 0.
    pub fixed_sample_seed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceResult {
    pub range: ParamRange,
    pub qubit_count: usize,
    pub variance: f64,
    pub sample_count: usize,
}

/// Least-squares line through `(n, log₁₀ variance)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub range: ParamRange,
    /// Decades of variance lost per added qubit.
    pub slope: f64,
    pub intercept: f64,
    /// Exponent in `Var ∝ exp(−α n)`, i.e. `−slope · ln 10`.
    pub alpha: f64,
    pub r_squared: f64,
}

/// Mean of squared deviations, dividing by N.
pub fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

pub fn run_variance_sweep(config: &VarianceSweepConfig) -> Result<Vec<VarianceResult>> {
    run_variance_sweep_with(config, &SweepOptions::default())
}

pub fn run_variance_sweep_with(
    config: &VarianceSweepConfig,
    options: &SweepOptions,
) -> Result<Vec<VarianceResult>> {
    config.validate()?;
    let mut results = Vec::with_capacity(config.ranges.len() * config.qubit_counts.len());
    for range in &config.ranges {
        for &n in &config.qubit_counts {
            let observable: Vec<usize> = (0..n).collect();
            let grads = (0..config.samples_per_point as u64)
                .into_par_iter()
                .map(|i| {
                    let index = if options.fixed_sample_seed { 0 } else { i };
                    let seed = derive_seed(config.base_seed, range.label.index(), n, index);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let axes: Vec<RotationAxis> = (0..n)
                        .map(|_| {
                            let drawn = RotationAxis::random(&mut rng);
                            options.axis_override.unwrap_or(drawn)
                        })
                        .collect();
                    let params = draw_params(range, n, &mut rng);
                    let circuit = build_random_bp_circuit(n, &axes, config.repetitions)?;
                    last_param_gradient(&circuit, &params, &observable)
                })
                .collect::<Result<Vec<f64>>>()?;
            results.push(VarianceResult {
                range: *range,
                qubit_count: n,
                variance: population_variance(&grads),
                sample_count: grads.len(),
            });
        }
    }
    Ok(results)
}

/// Fits log₁₀(variance) against qubit count for a single range.
pub fn fit_slope(results: &[VarianceResult]) -> Result<SlopeFit> {
    let first = results
        .first()
        .ok_or_else(|| Error::DegenerateData("no variance points to fit".into()))?;
    if results.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "{}: a slope needs at least 2 points, got 1",
            first.range.label
        )));
    }
    if let Some(other) = results.iter().find(|r| r.range.label != first.range.label) {
        return Err(Error::InvalidArgument(format!(
            "mixed ranges in one fit: {} and {}",
            first.range.label, other.range.label
        )));
    }
    if let Some(bad) = results.iter().find(|r| !r.variance.is_finite() || r.variance <= 0.0) {
        return Err(Error::DegenerateData(format!(
            "{} at n = {}: variance {} has no logarithm",
            bad.range.label, bad.qubit_count, bad.variance
        )));
    }

    let points: Vec<(f64, f64)> =
        results.iter().map(|r| (r.qubit_count as f64, r.variance.log10())).collect();
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateData(format!(
            "{}: all points share n = {}",
            first.range.label, first.qubit_count
        )));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(SlopeFit { range: first.range, slope, intercept, alpha: -slope * LN_10, r_squared })
}

/// One fit per range present in `results`, in first-appearance order.
pub fn fit_slopes(results: &[VarianceResult]) -> Vec<(ParamRange, Result<SlopeFit>)> {
    let mut order: Vec<ParamRange> = Vec::new();
    for r in results {
        if !order.iter().any(|o| o.label == r.range.label) {
            order.push(r.range);
        }
    }
    order
        .into_iter()
        .map(|range| {
            let points: Vec<VarianceResult> =
                results.iter().filter(|r| r.range.label == range.label).cloned().collect();
            (range, fit_slope(&points))
        })
        .collect()
}

/// How much shallower `shallow` decays than `steep`, in percent of `steep`.
pub fn relative_slope_improvement(shallow: &SlopeFit, steep: &SlopeFit) -> Result<f64> {
    for fit in [shallow, steep] {
        if fit.slope.is_nan() || fit.slope >= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{}: slope {} is not negative",
                fit.range.label, fit.slope
            )));
        }
    }
    Ok(100.0 * (steep.slope.abs() - shallow.slope.abs()) / steep.slope.abs())
}
