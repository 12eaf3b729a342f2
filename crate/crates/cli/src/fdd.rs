//! `fdd compute` — class discrepancies (plain, absolute, localized) for a
//! threshold hypothesis on the built-in analytic task: source uniform on
//! [0, 1], target uniform on [0, 2], truth at 1/2, class a threshold grid.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use fdd_core::datasets::threshold_domains;
use fdd_core::discrepancy::{absolute_fdd, fdd, localized_fdd, rashomon, TRange};
use fdd_core::hypotheses::{Hypothesis, HypothesisClass, LossKind};
use fdd_core::phi::PhiSpec;

use crate::output::{emit_json, load_config, numerical, set, usage, CmdResult};

#[derive(Subcommand)]
pub enum FddCommand {
    /// Compute one discrepancy estimate.
    Compute(ComputeArgs),
}

#[derive(Args)]
pub struct ComputeArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Kernel: kl, reverse_kl, chi2, or jeffreys:G1,G2.
    #[arg(long)]
    phi: Option<String>,
    /// Hypothesis class; `threshold` is the built-in analytic task.
    #[arg(long)]
    class: Option<String>,
    /// Threshold location of the fixed hypothesis h.
    #[arg(long)]
    h: Option<f64>,
    /// Scale range: all, nonneg, or fixed:T.
    #[arg(long)]
    t_range: Option<String>,
    /// Family: fdd or absolute (--rashomon switches to localized).
    #[arg(long)]
    family: Option<String>,
    /// Localize the supremum to source risk ≤ R.
    #[arg(long, value_name = "R")]
    rashomon: Option<f64>,
    /// Certification level for h itself; defaults to the Rashomon level.
    #[arg(long)]
    r1: Option<f64>,
    /// Endpoints of the threshold class interval, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    interval: Option<Vec<f64>>,
    /// Number of grid thresholds in the class.
    #[arg(long)]
    grid: Option<usize>,
    /// Write the JSON envelope here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeConfig {
    phi: String,
    class: String,
    h: f64,
    t_range: String,
    family: String,
    rashomon: Option<f64>,
    r1: Option<f64>,
    interval: (f64, f64),
    grid: usize,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        ComputeConfig {
            phi: "kl".into(),
            class: "threshold".into(),
            h: 0.5,
            t_range: "all".into(),
            family: "fdd".into(),
            rashomon: None,
            r1: None,
            interval: (0.0, 0.5),
            grid: 101,
        }
    }
}

pub fn run(cmd: FddCommand) -> CmdResult<()> {
    let FddCommand::Compute(args) = cmd;
    let mut cfg: ComputeConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.phi, args.phi);
    set(&mut cfg.class, args.class);
    set(&mut cfg.h, args.h);
    set(&mut cfg.t_range, args.t_range);
    set(&mut cfg.family, args.family);
    set(&mut cfg.rashomon, args.rashomon.map(Some));
    set(&mut cfg.r1, args.r1.map(Some));
    if let Some(iv) = args.interval {
        cfg.interval = (iv[0], iv[1]);
    }
    set(&mut cfg.grid, args.grid);

    // A Rashomon level localizes the plain family; asking for it on the
    // absolute family is a contradiction.
    if cfg.rashomon.is_some() && cfg.family == "fdd" {
        cfg.family = "localized".into();
    }
    match cfg.family.as_str() {
        "fdd" | "absolute" | "localized" => {}
        other => {
            return Err(usage(format!(
                "unknown family `{other}` (fdd, absolute, localized)"
            )))
        }
    }
    if cfg.family == "localized" && cfg.rashomon.is_none() {
        return Err(usage("the localized family needs --rashomon <R>"));
    }
    if cfg.family == "absolute" && cfg.rashomon.is_some() {
        return Err(usage("the absolute family has no localized form here"));
    }
    if cfg.class != "threshold" {
        return Err(usage(format!(
            "unknown class `{}` (only `threshold` is built in)",
            cfg.class
        )));
    }

    let kernel = PhiSpec::parse(&cfg.phi).map_err(|e| usage(e.to_string()))?;
    let t_range = TRange::parse(&cfg.t_range).map_err(|e| usage(e.to_string()))?;
    if cfg.family == "absolute" && t_range != TRange::AllReals {
        return Err(usage("the absolute family takes no scale; drop --t-range"));
    }

    let pair = threshold_domains();
    let class = HypothesisClass::threshold_grid(cfg.interval.0, cfg.interval.1, cfg.grid, LossKind::ZeroOne);
    let h = Hypothesis::Threshold { c: cfg.h };
    let mu = pair.source().density().clone();
    let nu = pair.target_density().clone();

    let estimate = match cfg.family.as_str() {
        "absolute" => absolute_fdd(&h, &class, &mu, &nu, &kernel).map_err(numerical)?,
        "fdd" => fdd(&h, &class, &nu, &mu, &kernel, t_range).map_err(numerical)?,
        _ => {
            let r = cfg.rashomon.expect("checked above");
            let r1 = cfg.r1.unwrap_or(r);
            cfg.r1 = Some(r1);
            let rset = rashomon(&class, pair.source(), r).map_err(numerical)?;
            localized_fdd(&h, &class, &rset, &nu, pair.source(), &kernel, t_range, r1)
                .map_err(numerical)?
        }
    };
    log::info!("{} discrepancy = {}", cfg.family, estimate.value);
    emit_json(&cfg, &estimate, args.out.as_deref())
}
