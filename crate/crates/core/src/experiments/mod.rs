//! The two studies: gradient-variance decay versus register size, and
//! identity-learning training runs under different initialisation ranges.
//!
//! Every random draw comes from a generator seeded by [`derive_seed`] on
//! `(base_seed, range, qubit count, sample or run index)`, so results do not
//! depend on how work is scheduled across threads.

mod seed;
mod training;
mod variance;

pub use seed::derive_seed;
pub use training::{
    run_noise_study, run_training, run_training_runs, run_training_with, RunTrace, TrainingConfig,
    TrainingOptions, TrainingTrace,
};
pub use variance::{
    fit_slope, fit_slopes, population_variance, relative_slope_improvement, run_variance_sweep,
    run_variance_sweep_with, SlopeFit, SweepOptions, VarianceResult, VarianceSweepConfig,
};
