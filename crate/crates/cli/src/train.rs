//! `train` — adversarial two-head training on a synthetic shift task.
//!
//! Prints a JSON summary of the run; `--log PATH` additionally writes the
//! per-step trajectory as CSV (step, discrepancy, source surrogate risk,
//! oracle target accuracy).

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use fdd_core::datasets::{gaussian_shift, two_moons, DomainPair};
use fdd_core::hypotheses::LossKind;
use fdd_core::trainer::{train, train_source_only, Discrepancy, TMode, TrainConfig, TrainState};

use crate::output::{emit_csv, emit_json, load_config, numerical, set, usage, CmdResult};

#[derive(Args)]
pub struct TrainArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Task: two-moons or gaussian-shift.
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
    /// Discrepancy: kl, chi2, jeffreys:G1,G2, abs_kl, abs_chi2, optkl, optchi2.
    #[arg(long)]
    discrepancy: Option<String>,
    /// Trade-off weight η > 0 on the discrepancy term.
    #[arg(long)]
    eta: Option<f64>,
    /// Scale handling: fixed_one or optimized.
    #[arg(long)]
    t_mode: Option<String>,
    /// Adversary ascent steps per outer step.
    #[arg(long)]
    inner_steps: Option<usize>,
    #[arg(long)]
    outer_steps: Option<usize>,
    #[arg(long)]
    outer_lr: Option<f64>,
    #[arg(long)]
    inner_lr: Option<f64>,
    /// Width of the shared representation.
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Differentiable training loss: surrogate or bounded_sigmoid.
    #[arg(long)]
    surrogate: Option<String>,
    /// Drop the discrepancy term and freeze the adversary (ablation).
    #[arg(long)]
    source_only: bool,
    /// Write the per-step trajectory CSV here.
    #[arg(long, value_name = "PATH")]
    log: Option<PathBuf>,
    /// Write the JSON summary here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainCliConfig {
    task: String,
    rotation: f64,
    n: usize,
    m: usize,
    noise: f64,
    shift: f64,
    dim: usize,
    discrepancy: String,
    eta: f64,
    t_mode: String,
    inner_steps: usize,
    outer_steps: usize,
    outer_lr: f64,
    inner_lr: f64,
    hidden: usize,
    seed: u64,
    surrogate: String,
    source_only: bool,
}

impl Default for TrainCliConfig {
    fn default() -> Self {
        TrainCliConfig {
            task: "two-moons".into(),
            rotation: 30.0,
            n: 256,
            m: 256,
            noise: 0.1,
            shift: 1.0,
            dim: 2,
            discrepancy: "kl".into(),
            eta: 1.0,
            t_mode: "fixed_one".into(),
            inner_steps: 5,
            outer_steps: 300,
            outer_lr: 0.05,
            inner_lr: 0.05,
            hidden: 16,
            seed: 0,
            surrogate: "surrogate".into(),
            source_only: false,
        }
    }
}

#[derive(Serialize)]
struct TrainResult {
    steps_run: usize,
    exploded: bool,
    t_fallbacks: usize,
    max_abs_divergence: f64,
    final_divergence: Option<f64>,
    final_source_risk: Option<f64>,
    source_accuracy: f64,
    target_accuracy: f64,
}

fn build_pair(cfg: &TrainCliConfig) -> CmdResult<DomainPair> {
    match cfg.task.as_str() {
        "two-moons" => Ok(two_moons(cfg.rotation, cfg.n, cfg.m, cfg.noise, cfg.seed)),
        "gaussian-shift" => {
            Ok(gaussian_shift(cfg.dim, cfg.shift, cfg.n, cfg.m, cfg.seed).0)
        }
        other => Err(usage(format!(
            "unknown task `{other}` (two-moons, gaussian-shift)"
        ))),
    }
}

fn build_train_config(cfg: &TrainCliConfig) -> CmdResult<TrainConfig> {
    let train_cfg = TrainConfig {
        discrepancy: Discrepancy::parse(&cfg.discrepancy).map_err(|e| usage(e.to_string()))?,
        eta: cfg.eta,
        t_mode: match cfg.t_mode.as_str() {
            "fixed_one" => TMode::FixedOne,
            "optimized" => TMode::Optimized,
            other => {
                return Err(usage(format!(
                    "unknown t_mode `{other}` (fixed_one, optimized)"
                )))
            }
        },
        inner_steps: cfg.inner_steps,
        outer_steps: cfg.outer_steps,
        outer_lr: cfg.outer_lr,
        inner_lr: cfg.inner_lr,
        seed: cfg.seed,
        surrogate: LossKind::parse(&cfg.surrogate).map_err(|e| usage(e.to_string()))?,
        hidden: cfg.hidden,
    };
    train_cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(train_cfg)
}

/// Trajectory rows: discrepancy and risk are logged during training; the
/// oracle target accuracy is recomputed per step from the snapshots.
fn trajectory_rows(state: &TrainState, pair: &DomainPair) -> CmdResult<Vec<String>> {
    let accuracy = state.accuracy_trajectory(pair).map_err(numerical)?;
    Ok(state
        .divergence_trajectory
        .iter()
        .zip(&state.risk_trajectory)
        .zip(&accuracy)
        .map(|(((step, d), (_, risk)), (_, acc))| format!("{step},{d},{risk},{acc}"))
        .collect())
}

pub fn run(args: TrainArgs) -> CmdResult<()> {
    let mut cfg: TrainCliConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.task, args.task);
    set(&mut cfg.rotation, args.rotation);
    set(&mut cfg.n, args.n);
    set(&mut cfg.m, args.m);
    set(&mut cfg.noise, args.noise);
    set(&mut cfg.shift, args.shift);
    set(&mut cfg.dim, args.dim);
    set(&mut cfg.discrepancy, args.discrepancy);
    set(&mut cfg.eta, args.eta);
    set(&mut cfg.t_mode, args.t_mode);
    set(&mut cfg.inner_steps, args.inner_steps);
    set(&mut cfg.outer_steps, args.outer_steps);
    set(&mut cfg.outer_lr, args.outer_lr);
    set(&mut cfg.inner_lr, args.inner_lr);
    set(&mut cfg.hidden, args.hidden);
    set(&mut cfg.seed, args.seed);
    set(&mut cfg.surrogate, args.surrogate);
    if args.source_only {
        cfg.source_only = true;
    }

    let pair = build_pair(&cfg)?;
    let train_cfg = build_train_config(&cfg)?;
    log::info!(
        "training {} for {} outer steps (eta = {}, seed = {})",
        cfg.discrepancy,
        cfg.outer_steps,
        cfg.eta,
        cfg.seed
    );
    let state = if cfg.source_only {
        train_source_only(&train_cfg, &pair).map_err(numerical)?
    } else {
        train(&train_cfg, &pair).map_err(numerical)?
    };
    if state.exploded {
        log::info!("run exploded after {} steps", state.steps_run);
    }

    if let Some(path) = &args.log {
        let rows = trajectory_rows(&state, &pair)?;
        emit_csv(&cfg, "step,discrepancy,source_risk,target_acc", &rows, Some(path))?;
    }

    let result = TrainResult {
        steps_run: state.steps_run,
        exploded: state.exploded,
        t_fallbacks: state.t_fallbacks,
        max_abs_divergence: state.max_discrepancy(),
        final_divergence: state.divergence_trajectory.last().map(|(_, d)| *d),
        final_source_risk: state.risk_trajectory.last().map(|(_, r)| *r),
        source_accuracy: state.source_accuracy(&pair).map_err(numerical)?,
        target_accuracy: state.target_accuracy(&pair).map_err(numerical)?,
    };
    emit_json(&cfg, &result, args.out.as_deref())
}
