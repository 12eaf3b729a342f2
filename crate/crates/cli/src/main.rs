//! `fdd-lab` — command-line front end for the f-divergence discrepancy
//! library.
//!
//! Structured results print as a JSON envelope
//! `{"schema": "fdd-lab/1", "config": {...}, "result": {...}}` where
//! `config` is the fully-resolved run configuration: saving it and feeding
//! it back through `--config` reproduces the output byte for byte. CSV
//! artifacts echo the same config on a leading `#` comment line.
//!
//! Exit status: 0 success, 2 usage error, 3 numerical failure,
//! 4 reproduction mismatch. Set `FDD_LOG=info` (or `debug`) for progress
//! notes on stderr.

mod bounds;
mod dataset;
mod estimate;
mod fdd;
mod output;
mod phi;
mod reproduce;
mod train;

use clap::{Parser, Subcommand};
use log::LevelFilter;

#[derive(Parser)]
#[command(name = "fdd-lab", version, about = "f-divergence domain-discrepancy lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a divergence kernel and exact divergences between atom sets.
    Phi(phi::PhiArgs),
    /// Variational divergence estimates from witness values.
    Estimate(estimate::EstimateArgs),
    /// Discrepancy computations on the analytic threshold task.
    #[command(subcommand)]
    Fdd(fdd::FddCommand),
    /// Target-risk and sample-based bounds.
    #[command(subcommand)]
    Bounds(bounds::BoundsCommand),
    /// Adversarial two-head training on a synthetic shift task.
    Train(train::TrainArgs),
    /// Dump benchmark tasks.
    #[command(subcommand)]
    Dataset(dataset::DatasetCommand),
    /// Recompute worked examples and verify them against pinned windows.
    #[command(subcommand)]
    Reproduce(reproduce::ReproduceCommand),
}

fn init_logging() {
    let level = match std::env::var("FDD_LOG").as_deref() {
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Off,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn main() {
    init_logging();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Phi(args) => phi::run(args),
        Command::Estimate(args) => estimate::run(args),
        Command::Fdd(cmd) => fdd::run(cmd),
        Command::Bounds(cmd) => bounds::run(cmd),
        Command::Train(args) => train::run(args),
        Command::Dataset(cmd) => dataset::run(cmd),
        Command::Reproduce(cmd) => reproduce::run(cmd),
    };
    if let Err(fault) = outcome {
        eprintln!("error: {}", fault.message());
        std::process::exit(fault.code());
    }
}
