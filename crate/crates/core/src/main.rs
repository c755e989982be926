use std::path::PathBuf;

use bp_lab::cli::{self, Command};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bp-lab", version, about = "Barren-plateau experiments on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Gradient variance versus qubit count, with log-linear slope fits.
    Variance(CommonArgs),
    /// Identity-learning training curves averaged over runs.
    Train(CommonArgs),
    /// Per-run training curves with finite-shot cost read-out.
    Noise(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() {
    let args = Cli::parse();
    let (command, common) = match args.command {
        Sub::Variance(a) => (Command::Variance, a),
        Sub::Train(a) => (Command::Train, a),
        Sub::Noise(a) => (Command::Noise, a),
    };
    let workers = common.workers.unwrap_or_else(cli::default_workers);
    std::process::exit(cli::run(command, &common.config, &common.out, workers));
}
