//! `dataset` — dump the benchmark tasks for inspection or external tools.
//!
//! Sampled tasks become CSV (features, hard label, domain column); the
//! analytic threshold pair becomes a JSON descriptor of its densities and
//! shared labelling rule.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use fdd_core::datasets::{gaussian_shift, threshold_domains, two_moons, Density, Domain, Truth};
use fdd_core::hypotheses::Hypothesis;

use crate::output::{emit_csv, emit_json, load_config, numerical, set, usage, CmdResult, Fault};

#[derive(Subcommand)]
pub enum DatasetCommand {
    /// Materialize one task to CSV (sampled) or JSON (analytic).
    Dump(DumpArgs),
}

pub fn run(cmd: DatasetCommand) -> CmdResult<()> {
    match cmd {
        DatasetCommand::Dump(args) => run_dump(args),
    }
}

#[derive(Args)]
pub struct DumpArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Task: two-moons, gaussian-shift, or threshold.
    #[arg(long)]
    task: Option<String>,
    /// Target rotation in degrees (two-moons).
    #[arg(long, allow_hyphen_values = true)]
    rotation: Option<f64>,
    /// Source sample size.
    #[arg(long)]
    n: Option<usize>,
    /// Target sample size.
    #[arg(long)]
    m: Option<usize>,
    /// Coordinate noise level (two-moons).
    #[arg(long)]
    noise: Option<f64>,
    /// Mean shift of the target cloud (gaussian-shift).
    #[arg(long)]
    shift: Option<f64>,
    /// Ambient dimension (gaussian-shift).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DumpConfig {
    task: String,
    rotation: f64,
    n: usize,
    m: usize,
    noise: f64,
    shift: f64,
    dim: usize,
    seed: u64,
}

impl Default for DumpConfig {
    fn default() -> Self {
        DumpConfig {
            task: "two-moons".into(),
            rotation: 30.0,
            n: 256,
            m: 256,
            noise: 0.1,
            shift: 1.0,
            dim: 2,
            seed: 0,
        }
    }
}

/// One CSV row per sample point: coordinates, hard label, domain tag.
fn domain_rows(domain: &Domain, tag: &str, rows: &mut Vec<String>) -> CmdResult<()> {
    let points = domain
        .sample_points()
        .ok_or_else(|| Fault::Numerical("expected a sampled density".into()))?;
    let labels = domain.hard_labels().map_err(numerical)?;
    for (point, label) in points.iter().zip(labels) {
        let mut row = String::new();
        for x in point {
            row.push_str(&format!("{x},"));
        }
        row.push_str(&format!("{},{tag}", u8::from(label)));
        rows.push(row);
    }
    Ok(())
}

fn density_descriptor(density: &Density) -> serde_json::Value {
    match density {
        Density::UniformInterval { lo, hi } => json!({
            "kind": "uniform_interval", "lo": lo, "hi": hi,
        }),
        Density::Discrete { probs } => json!({
            "kind": "discrete", "probs": probs,
        }),
        Density::Sample { points } => json!({
            "kind": "sample", "len": points.len(),
        }),
    }
}

fn truth_descriptor(truth: &Truth) -> serde_json::Value {
    match truth {
        Truth::Hyp(Hypothesis::Threshold { c }) => json!({
            "kind": "threshold", "at": c,
        }),
        Truth::Hyp(h) => json!({
            "kind": "hypothesis", "debug": format!("{h:?}"),
        }),
        Truth::PerPoint(scores) => json!({
            "kind": "per_point", "len": scores.len(),
        }),
    }
}

fn run_dump(args: DumpArgs) -> CmdResult<()> {
    let mut cfg: DumpConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.task, args.task);
    set(&mut cfg.rotation, args.rotation);
    set(&mut cfg.n, args.n);
    set(&mut cfg.m, args.m);
    set(&mut cfg.noise, args.noise);
    set(&mut cfg.shift, args.shift);
    set(&mut cfg.dim, args.dim);
    set(&mut cfg.seed, args.seed);

    let pair = match cfg.task.as_str() {
        "two-moons" => two_moons(cfg.rotation, cfg.n, cfg.m, cfg.noise, cfg.seed),
        "gaussian-shift" => gaussian_shift(cfg.dim, cfg.shift, cfg.n, cfg.m, cfg.seed).0,
        "threshold" => {
            let pair = threshold_domains();
            let target = pair.target().map_err(numerical)?;
            let descriptor = json!({
                "source": {
                    "density": density_descriptor(pair.source().density()),
                    "truth": truth_descriptor(pair.source().truth()),
                },
                "target": {
                    "density": density_descriptor(target.density()),
                    "truth": truth_descriptor(target.truth()),
                },
            });
            return emit_json(&cfg, &descriptor, args.out.as_deref());
        }
        other => {
            return Err(usage(format!(
                "unknown task `{other}` (two-moons, gaussian-shift, threshold)"
            )))
        }
    };

    let dim = pair
        .source()
        .density()
        .dim()
        .ok_or_else(|| Fault::Numerical("sampled task without a dimension".into()))?;
    let mut header: String = (0..dim).map(|i| format!("x{i},")).collect();
    header.push_str("y,domain");
    let mut rows = Vec::new();
    domain_rows(pair.source(), "source", &mut rows)?;
    domain_rows(pair.target().map_err(numerical)?, "target", &mut rows)?;
    emit_csv(&cfg, &header, &rows, args.out.as_deref())
}
