//! `reproduce` — recompute the worked 1-D threshold example end to end
//! and check every number against its pinned window. Any row out of range
//! exits with status 4 after the table is printed.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use fdd_core::bounds::{fastrate_constants, lambda_star, target_bound_localized, LocalizationParams};
use fdd_core::datasets::threshold_domains;
use fdd_core::discrepancy::{
    cumulant_profile, fdd, localized_fdd, rashomon, sup_source_disagreement, TRange,
};
use fdd_core::hypotheses::{risk, Hypothesis, HypothesisClass, LossKind};
use fdd_core::phi::PhiSpec;

use crate::output::{emit_json, numerical, usage, write_text, CmdResult, Fault};

#[derive(Subcommand)]
pub enum ReproduceCommand {
    /// The 1-D uniform-threshold example: μ = U[0,1], ν = U[0,2], h at 0.5.
    ThresholdExample(ReproduceArgs),
}

pub fn run(cmd: ReproduceCommand) -> CmdResult<()> {
    match cmd {
        ReproduceCommand::ThresholdExample(args) => run_threshold(args),
    }
}

#[derive(Args)]
pub struct ReproduceArgs {
    /// Output format: table or json.
    #[arg(long, default_value = "table")]
    format: String,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ReproduceConfig {
    example: &'static str,
}

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ReproduceResult {
    rows: Vec<CheckRow>,
    warning: Option<String>,
    all_pass: bool,
}

fn row(name: &'static str, value: f64, lo: f64, hi: f64) -> CheckRow {
    CheckRow {
        name,
        value,
        lo,
        hi,
        pass: value >= lo && value <= hi,
    }
}

fn compute_rows() -> CmdResult<ReproduceResult> {
    let pair = threshold_domains();
    let class = HypothesisClass::threshold_grid(0.0, 0.5, 101, LossKind::ZeroOne);
    let h = Hypothesis::Threshold { c: 0.5 };
    let mu = pair.source();
    let nu = pair.target_density();
    let kl = PhiSpec::parse("kl").map_err(numerical)?;
    let source_risk = risk(&h, mu, class.loss).map_err(numerical)?;

    // Full-class discrepancy and the localized variant at r = 1/4.
    let full = fdd(&h, &class, nu, mu.density(), &kl, TRange::AllReals).map_err(numerical)?;
    let r = 0.25;
    let rset = rashomon(&class, mu, r).map_err(numerical)?;
    let localized =
        localized_fdd(&h, &class, &rset, nu, mu, &kl, TRange::AllReals, r).map_err(numerical)?;
    let (r_sup, _) = sup_source_disagreement(&h, &class, &rset, mu.density()).map_err(numerical)?;
    let (lambda, _) = lambda_star(&class, None, &pair).map_err(numerical)?;
    let (lambda_r, _) = lambda_star(&class, Some(&rset), &pair).map_err(numerical)?;

    // Shrinking the certification level to zero leaves only the truth,
    // and every localized quantity collapses with it.
    let rset0 = rashomon(&class, mu, 0.0).map_err(numerical)?;
    let localized0 =
        localized_fdd(&h, &class, &rset0, nu, mu, &kl, TRange::AllReals, 0.0).map_err(numerical)?;
    let (r_sup0, _) =
        sup_source_disagreement(&h, &class, &rset0, mu.density()).map_err(numerical)?;

    // Fast-rate constants at both ends of the cap range, then the fully
    // assembled localized bound using the cap the example's levels imply.
    let anchor_low = fastrate_constants(0.0, 0.999).map_err(numerical)?;
    let anchor_high = fastrate_constants(1.0, 0.1).map_err(numerical)?;
    let params =
        LocalizationParams::new(r, r, anchor_high.c1, 0.1).map_err(|e| usage(e.to_string()))?;
    let profile =
        cumulant_profile(&h, &class, Some(&rset), mu.density(), &kl).map_err(numerical)?;
    let bound = target_bound_localized(
        source_risk,
        localized.value,
        r_sup,
        &params,
        lambda_r,
        Some(&profile),
    )
    .map_err(numerical)?;

    let rows = vec![
        row("fdd_kl", full.value, 0.130, 0.132),
        row("sqrt_fdd_kl", full.value.sqrt(), 0.355, 0.365),
        row("localized_fdd_kl_r25", localized.value, 0.047, 0.049),
        row("source_disagreement_r25", r_sup, 0.25, 0.25),
        row("lambda_star", lambda, 0.0, 0.0),
        row("lambda_star_r25", lambda_r, 0.0, 0.0),
        row("localized_bound_total", bound.total, 0.037, 0.039),
        row("localized_fdd_kl_r0", localized0.value, 0.0, 0.0),
        row("source_disagreement_r0", r_sup0, 0.0, 0.0),
        row("fastrate_c1_cap0", anchor_low.c1, 1.255, 1.257),
        row("fastrate_coeff_cap0", anchor_low.coefficient, 0.795, 0.797),
        row("fastrate_c1_cap1", anchor_high.c1, 3.73, 3.75),
        row("fastrate_coeff_cap1", anchor_high.coefficient, 0.266, 0.268),
    ];
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(ReproduceResult {
        rows,
        warning: bound.warning,
        all_pass,
    })
}

fn render_table(result: &ReproduceResult) -> String {
    let mut text = String::new();
    let width = result.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &result.rows {
        let status = if r.pass { "ok" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{:width$}  {:>18.15}  [{}, {}]  {status}",
            r.name, r.value, r.lo, r.hi
        );
    }
    if let Some(w) = &result.warning {
        let _ = writeln!(text, "note: {w}");
    }
    let _ = writeln!(
        text,
        "{}",
        if result.all_pass {
            "all checks passed"
        } else {
            "SOME CHECKS FAILED"
        }
    );
    text
}

fn run_threshold(args: ReproduceArgs) -> CmdResult<()> {
    let cfg = ReproduceConfig {
        example: "threshold-example",
    };
    let result = compute_rows()?;
    match args.format.as_str() {
        "table" => write_text(&render_table(&result), args.out.as_deref())?,
        "json" => emit_json(&cfg, &result, args.out.as_deref())?,
        other => return Err(usage(format!("unknown format `{other}` (table, json)"))),
    }
    if result.all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = result
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name)
            .collect();
        Err(Fault::Mismatch(format!(
            "reproduction mismatch: {}",
            failed.join(", ")
        )))
    }
}
