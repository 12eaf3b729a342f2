//! `estimate` — evaluate one variational objective (weak, shifted, or
//! scaled) on explicit weighted witness values.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use fdd_core::phi::PhiSpec;
use fdd_core::variational::{lt_objective, scaled_objective, shifted_objective, WitnessValues};

use crate::output::{emit_json, load_config, numerical, set, usage, CmdResult};

#[derive(Args)]
pub struct EstimateArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Kernel: kl, reverse_kl, chi2, or jeffreys:G1,G2.
    #[arg(long)]
    phi: Option<String>,
    /// Objective: lt, shifted, or scaled.
    #[arg(long)]
    method: Option<String>,
    /// Witness values as JSON — either inline (starts with `{`) or a path.
    /// Shape: {"on_p": [..], "on_q": [..], "weights_p": [..]?, "weights_q": [..]?};
    /// omitted weights are uniform.
    #[arg(long, value_name = "JSON|PATH")]
    input: Option<String>,
    /// Write the JSON envelope here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessSpec {
    on_p: Vec<f64>,
    on_q: Vec<f64>,
    weights_p: Option<Vec<f64>>,
    weights_q: Option<Vec<f64>>,
}

impl WitnessSpec {
    fn build(&self) -> CmdResult<WitnessValues> {
        let uniform = |n: usize| vec![1.0 / n as f64; n];
        let wp = self
            .weights_p
            .clone()
            .unwrap_or_else(|| uniform(self.on_p.len().max(1)));
        let wq = self
            .weights_q
            .clone()
            .unwrap_or_else(|| uniform(self.on_q.len().max(1)));
        WitnessValues::new(self.on_p.clone(), wp, self.on_q.clone(), wq)
            .map_err(|e| usage(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    phi: String,
    method: String,
    witness: WitnessSpec,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            phi: "kl".into(),
            method: "shifted".into(),
            witness: WitnessSpec::default(),
        }
    }
}

#[derive(Serialize)]
struct EstimateResult {
    method: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_star: Option<f64>,
    on_boundary: bool,
}

pub fn run(args: EstimateArgs) -> CmdResult<()> {
    let mut cfg: EstimateConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.phi, args.phi);
    set(&mut cfg.method, args.method);
    if let Some(input) = args.input {
        let text = if input.trim_start().starts_with('{') {
            input
        } else {
            std::fs::read_to_string(&input)
                .map_err(|e| usage(format!("cannot read witness {input}: {e}")))?
        };
        cfg.witness =
            serde_json::from_str(&text).map_err(|e| usage(format!("bad witness JSON: {e}")))?;
    }

    let kernel = PhiSpec::parse(&cfg.phi).map_err(|e| usage(e.to_string()))?;
    let witness = cfg.witness.build()?;
    let result = match cfg.method.as_str() {
        "lt" => {
            let value = lt_objective(&witness, &kernel).map_err(numerical)?;
            EstimateResult {
                method: cfg.method.clone(),
                value,
                alpha_star: None,
                t_star: None,
                on_boundary: false,
            }
        }
        "shifted" | "scaled" => {
            let r = if cfg.method == "shifted" {
                shifted_objective(&witness, &kernel).map_err(numerical)?
            } else {
                scaled_objective(&witness, &kernel).map_err(numerical)?
            };
            EstimateResult {
                method: cfg.method.clone(),
                value: r.value,
                alpha_star: r.alpha_star,
                t_star: r.t_star,
                on_boundary: r.on_boundary,
            }
        }
        other => return Err(usage(format!("unknown method `{other}` (lt, shifted, scaled)"))),
    };
    log::info!("{} objective = {}", result.method, result.value);
    emit_json(&cfg, &result, args.out.as_deref())
}
