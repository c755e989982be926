//! Command implementations behind the `bp-lab` binary.
//!
//! Each command reads one JSON config, runs its experiment inside a worker
//! pool of the requested size, and writes CSV tables plus `manifest.json` to
//! the output directory. Files written before a failure are removed again.
//!
//! Output files:
//!
//! | command    | file                | columns |
//! |------------|---------------------|---------|
//! | `variance` | `variance.csv`      | range_label, low, high, n_qubits, samples, variance, log10_variance |
//! | `variance` | `slopes.csv`        | range_label, slope, alpha, intercept, r_squared |
//! | `train`    | `training.csv`      | range_label, n_qubits, run_index, step, cost |
//! | `train`    | `training_mean.csv` | range_label, n_qubits, step, mean_cost |
//! | `noise`    | `noise_runs.csv`    | range_label, n_qubits, shots, run_index, step, cost |
//!
//! Steps are numbered from 1; the cost at step `t` is measured after the
//! `t`-th optimiser update. Reals are written with 16 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    fit_slopes, run_noise_study, run_training_runs, run_variance_sweep, RunTrace, TrainingConfig,
    TrainingOptions, TrainingTrace, VarianceSweepConfig,
};

/// Environment variable overriding `base_seed` (decimal u64).
pub const SEED_ENV: &str = "BP_LAB_SEED";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Variance,
    Train,
    Noise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentConfig {
    Variance(VarianceSweepConfig),
    Training(TrainingConfig),
}

/// Record of one command invocation, written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub config: ExperimentConfig,
    pub tool_version: String,
    pub base_seed: u64,
    /// `exact` or `shots=<n>` for training commands.
    pub readout: Option<String>,
    pub workers: usize,
    pub started_at: String,
    pub finished_at: String,
    pub output_paths: Vec<PathBuf>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest is always serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("manifest: {e}")))
    }
}

/// Parses a config document and applies the seed override from the environment.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|e| Error::Config(format!("{SEED_ENV}={v:?} is not a 64-bit decimal integer: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Config(format!("{SEED_ENV}: {e}"))),
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x:.15e}")
}

/// Files created by a command; deleted on drop unless `keep` is called.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    keep: bool,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new(), keep: false })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    fn manifest(&mut self, mut manifest: RunManifest) -> Result<RunManifest> {
        let path = self.dir.join("manifest.json");
        manifest.output_paths = self.written.clone();
        manifest.output_paths.push(path.clone());
        manifest.finished_at = now();
        self.written.push(path.clone());
        fs::write(&path, manifest.to_json())?;
        self.keep = true;
        Ok(manifest)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(format!("worker pool: {e}")))?;
    pool.install(f)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Gradient-variance sweep: `variance.csv`, `slopes.csv`, `manifest.json`.
pub fn cmd_variance(config_path: &Path, out_dir: &Path, workers: usize) -> Result<RunManifest> {
    let started_at = now();
    let mut config: VarianceSweepConfig = load_config(config_path)?;
    if let Some(seed) = seed_override()? {
        config.base_seed = seed;
    }
    config.validate()?;

    let results = in_pool(workers, || run_variance_sweep(&config))?;

    let mut out = Outputs::new(out_dir)?;
    let rows = results
        .iter()
        .map(|r| {
            vec![
                r.range.label.to_string(),
                fmt_real(r.range.low),
                fmt_real(r.range.high),
                r.qubit_count.to_string(),
                r.sample_count.to_string(),
                fmt_real(r.variance),
                fmt_real(r.variance.log10()),
            ]
        })
        .collect();
    out.csv(
        "variance.csv",
        &["range_label", "low", "high", "n_qubits", "samples", "variance", "log10_variance"],
        rows,
    )?;

    let mut slope_rows = Vec::new();
    for (range, fit) in fit_slopes(&results) {
        match fit {
            Ok(f) => slope_rows.push(vec![
                range.label.to_string(),
                fmt_real(f.slope),
                fmt_real(f.alpha),
                fmt_real(f.intercept),
                fmt_real(f.r_squared),
            ]),
            Err(e) => eprintln!("warning: no slope for {}: {e}", range.label),
        }
    }
    out.csv("slopes.csv", &["range_label", "slope", "alpha", "intercept", "r_squared"], slope_rows)?;

    out.manifest(RunManifest {
        command: Command::Variance,
        base_seed: config.base_seed,
        config: ExperimentConfig::Variance(config),
        tool_version: TOOL_VERSION.to_string(),
        readout: None,
        workers,
        started_at,
        finished_at: String::new(),
        output_paths: Vec::new(),
    })
}

fn load_training(config_path: &Path) -> Result<TrainingConfig> {
    let mut config: TrainingConfig = load_config(config_path)?;
    if let Some(seed) = seed_override()? {
        config.base_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn readout_label(config: &TrainingConfig) -> String {
    match config.shots {
        Some(s) => format!("shots={s}"),
        None => "exact".to_string(),
    }
}

/// Training study: `training.csv`, `training_mean.csv`, `manifest.json`.
pub fn cmd_train(config_path: &Path, out_dir: &Path, workers: usize) -> Result<RunManifest> {
    let started_at = now();
    let config = load_training(config_path)?;

    let runs = in_pool(workers, || run_training_runs(&config, &TrainingOptions::default()))?;
    let means: Vec<TrainingTrace> = runs
        .chunks(config.runs)
        .map(|chunk| {
            let count = chunk.len() as f64;
            let mean_costs = (0..config.steps)
                .map(|t| chunk.iter().map(|r| r.costs[t]).sum::<f64>() / count)
                .collect();
            TrainingTrace {
                range: chunk[0].range,
                qubit_count: chunk[0].qubit_count,
                per_run_costs: chunk.iter().map(|r| r.costs.clone()).collect(),
                mean_costs,
            }
        })
        .collect();

    let mut out = Outputs::new(out_dir)?;
    out.csv(
        "training.csv",
        &["range_label", "n_qubits", "run_index", "step", "cost"],
        run_rows(&runs, None),
    )?;
    let mean_rows = means
        .iter()
        .flat_map(|tr| {
            tr.mean_costs.iter().enumerate().map(move |(t, c)| {
                vec![
                    tr.range.label.to_string(),
                    tr.qubit_count.to_string(),
                    (t + 1).to_string(),
                    fmt_real(*c),
                ]
            })
        })
        .collect();
    out.csv("training_mean.csv", &["range_label", "n_qubits", "step", "mean_cost"], mean_rows)?;

    out.manifest(RunManifest {
        command: Command::Train,
        base_seed: config.base_seed,
        readout: Some(readout_label(&config)),
        config: ExperimentConfig::Training(config),
        tool_version: TOOL_VERSION.to_string(),
        workers,
        started_at,
        finished_at: String::new(),
        output_paths: Vec::new(),
    })
}

/// Shot-noise study: per-run `noise_runs.csv` and `manifest.json`.
pub fn cmd_noise(config_path: &Path, out_dir: &Path, workers: usize) -> Result<RunManifest> {
    let started_at = now();
    let config = load_training(config_path)?;
    let shots = config
        .shots
        .ok_or_else(|| Error::Config("missing field `shots`: the noise study needs a shot count".into()))?;

    let runs = in_pool(workers, || run_noise_study(&config))?;

    let mut out = Outputs::new(out_dir)?;
    out.csv(
        "noise_runs.csv",
        &["range_label", "n_qubits", "shots", "run_index", "step", "cost"],
        run_rows(&runs, Some(shots)),
    )?;
    out.manifest(RunManifest {
        command: Command::Noise,
        base_seed: config.base_seed,
        readout: Some(readout_label(&config)),
        config: ExperimentConfig::Training(config),
        tool_version: TOOL_VERSION.to_string(),
        workers,
        started_at,
        finished_at: String::new(),
        output_paths: Vec::new(),
    })
}

fn run_rows(runs: &[RunTrace], shots: Option<u64>) -> Vec<Vec<String>> {
    runs.iter()
        .flat_map(|r| {
            r.costs.iter().enumerate().map(move |(t, c)| {
                let mut row = vec![r.range.label.to_string(), r.qubit_count.to_string()];
                if let Some(s) = shots {
                    row.push(s.to_string());
                }
                row.extend([r.run_index.to_string(), (t + 1).to_string(), fmt_real(*c)]);
                row
            })
        })
        .collect()
}

/// Runs `command` and maps the outcome onto the exit-code contract.
pub fn run(command: Command, config: &Path, out: &Path, workers: usize) -> i32 {
    let result = match command {
        Command::Variance => cmd_variance(config, out, workers),
        Command::Train => cmd_train(config, out, workers),
        Command::Noise => cmd_noise(config, out, workers),
    };
    match result {
        Ok(manifest) => {
            for p in &manifest.output_paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
