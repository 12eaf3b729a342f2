//! `phi` — inspect a divergence kernel: metadata, pointwise φ / φ*
//! evaluation, and the exact divergence between two finite distributions.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use fdd_core::phi::{exact_f_divergence, DiscreteDistribution, PhiSpec};

use crate::output::{emit_json, load_config, numerical, set, usage, CmdResult};

#[derive(Args)]
pub struct PhiArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Kernel: kl, reverse_kl, chi2, or jeffreys:G1,G2.
    #[arg(long)]
    phi: Option<String>,
    /// Probabilities of the first distribution, comma-separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Probabilities of the second distribution, comma-separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Also evaluate φ at this density ratio.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<f64>,
    /// Also evaluate the convex conjugate φ* at this argument.
    #[arg(long, allow_hyphen_values = true)]
    conjugate_at: Option<f64>,
    /// Write the JSON envelope here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiConfig {
    phi: String,
    p: Vec<f64>,
    q: Vec<f64>,
    at: Option<f64>,
    conjugate_at: Option<f64>,
}

impl Default for PhiConfig {
    fn default() -> Self {
        PhiConfig {
            phi: "kl".into(),
            p: Vec::new(),
            q: Vec::new(),
            at: None,
            conjugate_at: None,
        }
    }
}

#[derive(Serialize)]
struct KernelInfo {
    name: String,
    composite: bool,
    curvature_at_one: f64,
    /// (lo, hi) of the conjugate's domain; absent for composites.
    #[serde(skip_serializing_if = "Option::is_none")]
    conjugate_domain: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct PhiResult {
    kernel: KernelInfo,
    /// Exact divergence of the supplied pair, when one was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    divergence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_at: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conjugate_at: Option<f64>,
}

pub fn run(args: PhiArgs) -> CmdResult<()> {
    let mut cfg: PhiConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.phi, args.phi);
    set(&mut cfg.p, args.p);
    set(&mut cfg.q, args.q);
    set(&mut cfg.at, args.at.map(Some));
    set(&mut cfg.conjugate_at, args.conjugate_at.map(Some));

    let kernel = PhiSpec::parse(&cfg.phi).map_err(|e| usage(e.to_string()))?;
    if cfg.p.is_empty() != cfg.q.is_empty() {
        return Err(usage("--p and --q must be given together"));
    }

    let divergence = if cfg.p.is_empty() {
        None
    } else {
        let p = DiscreteDistribution::from_probs(cfg.p.clone()).map_err(|e| usage(e.to_string()))?;
        let q = DiscreteDistribution::from_probs(cfg.q.clone()).map_err(|e| usage(e.to_string()))?;
        Some(exact_f_divergence(&p, &q, &kernel).map_err(numerical)?)
    };
    let phi_at = match cfg.at {
        Some(x) => Some(kernel.phi(x).map_err(numerical)?),
        None => None,
    };
    let conjugate_at = match cfg.conjugate_at {
        Some(y) => Some(kernel.phi_star(y).map_err(numerical)?),
        None => None,
    };

    let result = PhiResult {
        kernel: KernelInfo {
            name: kernel.name(),
            composite: kernel.is_composite(),
            curvature_at_one: kernel.curvature_at_one(),
            conjugate_domain: kernel.conjugate_domain().ok(),
        },
        divergence,
        phi_at,
        conjugate_at,
    };
    log::info!("kernel {}", result.kernel.name);
    emit_json(&cfg, &result, args.out.as_deref())
}
