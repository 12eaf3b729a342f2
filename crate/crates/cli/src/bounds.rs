//! `bounds` — target-risk bounds on the analytic threshold task, the
//! sample-based bound assemblies, and the fast-rate constant solver.
//!
//! `--csv` swaps the JSON envelope for one CSV row per bound component.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use fdd_core::bounds::{
    cross_domain_error, fastrate_constants, generalization_bound, lambda_star,
    target_bound_absolute, target_bound_absolute_lambda_free, target_bound_general,
    target_bound_localized, target_bound_slow, BoundReport, EmpiricalInputs, GeneralizationKind,
    LocalizationParams,
};
use fdd_core::datasets::threshold_domains;
use fdd_core::discrepancy::{
    absolute_fdd, cumulant_profile, fdd, localized_fdd, rashomon, sup_source_disagreement, TRange,
};
use fdd_core::hypotheses::{risk, Hypothesis, HypothesisClass, LossKind};
use fdd_core::phi::PhiSpec;

use crate::output::{emit_csv, emit_json, load_config, numerical, set, usage, CmdResult};

#[derive(Subcommand)]
pub enum BoundsCommand {
    /// Population target-risk bounds on the analytic threshold task.
    Target(TargetArgs),
    /// Assemble a sample-based bound from supplied empirical ingredients.
    Generalization(GenArgs),
    /// Largest fast-rate constant C1 on the worst-case feasibility curve.
    Fastrate(FastrateArgs),
}

pub fn run(cmd: BoundsCommand) -> CmdResult<()> {
    match cmd {
        BoundsCommand::Target(args) => run_target(args),
        BoundsCommand::Generalization(args) => run_generalization(args),
        BoundsCommand::Fastrate(args) => run_fastrate(args),
    }
}

/// BoundReport rows for `--csv`: one per component, then the total.
fn report_rows(report: &BoundReport) -> Vec<String> {
    let mut rows: Vec<String> = report
        .components
        .iter()
        .map(|(name, value)| format!("{name},{value}"))
        .collect();
    rows.push(format!("total,{}", report.total));
    rows
}

fn emit_report<C: Serialize>(
    cfg: &C,
    report: &BoundReport,
    csv: bool,
    out: Option<&std::path::Path>,
) -> CmdResult<()> {
    if let Some(w) = &report.warning {
        log::info!("warning: {w}");
    }
    if csv {
        emit_csv(cfg, "component,value", &report_rows(report), out)
    } else {
        emit_json(cfg, report, out)
    }
}

// ---------------------------------------------------------------------------
// bounds target

#[derive(Args)]
pub struct TargetArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Bound kind: abs, general, slow, or localized.
    #[arg(long)]
    kind: Option<String>,
    /// Threshold location of the bounded hypothesis h.
    #[arg(long)]
    h: Option<f64>,
    /// Kernel: kl, reverse_kl, chi2, or jeffreys:G1,G2.
    #[arg(long)]
    phi: Option<String>,
    /// Scale range for the discrepancy supremum: all, nonneg, or fixed:T.
    #[arg(long)]
    t_range: Option<String>,
    /// Rashomon level r (localized only).
    #[arg(long)]
    r: Option<f64>,
    /// Certification level r1 for h; defaults to r.
    #[arg(long)]
    r1: Option<f64>,
    /// Fast-rate constant C1; solved from the worst-case curve when omitted.
    #[arg(long)]
    c1: Option<f64>,
    /// Fast-rate constant C2 in (0, 1) (localized only).
    #[arg(long)]
    c2: Option<f64>,
    /// Replace λ* with the cross-domain error (abs only).
    #[arg(long)]
    lambda_free: bool,
    /// Number of grid thresholds in the class.
    #[arg(long)]
    grid: Option<usize>,
    /// Emit one CSV row per component instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetConfig {
    kind: String,
    h: f64,
    phi: String,
    t_range: String,
    r: Option<f64>,
    r1: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    lambda_free: bool,
    grid: usize,
}

impl Default for TargetConfig {
    fn default() -> Self {
        TargetConfig {
            kind: "general".into(),
            h: 0.5,
            phi: "kl".into(),
            t_range: "all".into(),
            r: None,
            r1: None,
            c1: None,
            c2: None,
            lambda_free: false,
            grid: 101,
        }
    }
}

fn run_target(args: TargetArgs) -> CmdResult<()> {
    let mut cfg: TargetConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.kind, args.kind);
    set(&mut cfg.h, args.h);
    set(&mut cfg.phi, args.phi);
    set(&mut cfg.t_range, args.t_range);
    set(&mut cfg.r, args.r.map(Some));
    set(&mut cfg.r1, args.r1.map(Some));
    set(&mut cfg.c1, args.c1.map(Some));
    set(&mut cfg.c2, args.c2.map(Some));
    if args.lambda_free {
        cfg.lambda_free = true;
    }
    set(&mut cfg.grid, args.grid);

    let kernel = PhiSpec::parse(&cfg.phi).map_err(|e| usage(e.to_string()))?;
    let t_range = TRange::parse(&cfg.t_range).map_err(|e| usage(e.to_string()))?;
    if cfg.lambda_free && cfg.kind != "abs" {
        return Err(usage("--lambda-free applies to the abs kind only"));
    }

    let pair = threshold_domains();
    let class = HypothesisClass::threshold_grid(0.0, 0.5, cfg.grid, LossKind::ZeroOne);
    let h = Hypothesis::Threshold { c: cfg.h };
    let mu = pair.source().density().clone();
    let nu = pair.target_density().clone();
    let source_risk = risk(&h, pair.source(), class.loss).map_err(numerical)?;

    let report = match cfg.kind.as_str() {
        "abs" => {
            let est = absolute_fdd(&h, &class, &mu, &nu, &kernel).map_err(numerical)?;
            if cfg.lambda_free {
                // Both labelling functions are the shared truth at 1/2.
                let truth = Hypothesis::Threshold { c: 0.5 };
                let cross = cross_domain_error(&truth, &truth, &mu, &nu, class.loss)
                    .map_err(numerical)?;
                target_bound_absolute_lambda_free(source_risk, est.value, cross)
            } else {
                let (lambda, _) = lambda_star(&class, None, &pair).map_err(numerical)?;
                target_bound_absolute(source_risk, est.value, lambda)
            }
        }
        "general" => {
            let est = fdd(&h, &class, &nu, &mu, &kernel, t_range).map_err(numerical)?;
            let profile = cumulant_profile(&h, &class, None, &mu, &kernel).map_err(numerical)?;
            let (lambda, _) = lambda_star(&class, None, &pair).map_err(numerical)?;
            target_bound_general(source_risk, est.value, &profile, lambda).map_err(numerical)?
        }
        "slow" => {
            let est = fdd(&h, &class, &nu, &mu, &kernel, t_range).map_err(numerical)?;
            let (lambda, _) = lambda_star(&class, None, &pair).map_err(numerical)?;
            target_bound_slow(source_risk, est.value, &kernel, lambda).map_err(numerical)?
        }
        "localized" => {
            let r = cfg.r.ok_or_else(|| usage("the localized kind needs --r"))?;
            let c2 = cfg.c2.ok_or_else(|| usage("the localized kind needs --c2"))?;
            let r1 = cfg.r1.unwrap_or(r);
            cfg.r1 = Some(r1);
            let m_cap = (r1 + r).min(1.0);
            let c1 = match cfg.c1 {
                Some(c1) => c1,
                None => {
                    let solved = fastrate_constants(m_cap, c2).map_err(numerical)?;
                    solved.c1
                }
            };
            cfg.c1 = Some(c1);
            let params = LocalizationParams::new(r1, r, c1, c2).map_err(|e| usage(e.to_string()))?;
            let rset = rashomon(&class, pair.source(), r).map_err(numerical)?;
            let est = localized_fdd(&h, &class, &rset, &nu, pair.source(), &kernel, t_range, r1)
                .map_err(numerical)?;
            let (r_sup, _) =
                sup_source_disagreement(&h, &class, &rset, &mu).map_err(numerical)?;
            let (lambda_r, _) = lambda_star(&class, Some(&rset), &pair).map_err(numerical)?;
            let profile =
                cumulant_profile(&h, &class, Some(&rset), &mu, &kernel).map_err(numerical)?;
            target_bound_localized(source_risk, est.value, r_sup, &params, lambda_r, Some(&profile))
                .map_err(numerical)?
        }
        other => {
            return Err(usage(format!(
                "unknown kind `{other}` (abs, general, slow, localized)"
            )))
        }
    };
    emit_report(&cfg, &report, args.csv, args.out.as_deref())
}

// ---------------------------------------------------------------------------
// bounds generalization

#[derive(Args)]
pub struct GenArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Bound kind: thm33_kl, thm56_localized_kl, thmD6_slow, or thmD9_chi2.
    #[arg(long)]
    kind: Option<String>,
    /// Empirical source risk R_μ̂(h).
    #[arg(long)]
    source_risk: Option<f64>,
    /// Empirical discrepancy of the matching family.
    #[arg(long)]
    discrepancy: Option<f64>,
    /// Rademacher complexity estimate on the source sample.
    #[arg(long)]
    rad_source: Option<f64>,
    /// Rademacher complexity estimate on the target sample.
    #[arg(long)]
    rad_target: Option<f64>,
    /// λ* (or λ*_r for localized kinds).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Confidence level δ in (0, 1).
    #[arg(long)]
    delta: Option<f64>,
    /// Source sample size.
    #[arg(long)]
    n: Option<usize>,
    /// Target sample size.
    #[arg(long)]
    m: Option<usize>,
    /// Localized disagreement supremum R^r_μ(h) (localized kinds).
    #[arg(long)]
    r_sup: Option<f64>,
    /// Localization levels and constants (localized kinds).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Emit one CSV row per component instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    kind: String,
    source_risk: Option<f64>,
    discrepancy: Option<f64>,
    rad_source: Option<f64>,
    rad_target: Option<f64>,
    lambda: f64,
    delta: f64,
    n: Option<usize>,
    m: Option<usize>,
    r_sup: Option<f64>,
    r: Option<f64>,
    r1: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            kind: "thm33_kl".into(),
            source_risk: None,
            discrepancy: None,
            rad_source: None,
            rad_target: None,
            lambda: 0.0,
            delta: 0.05,
            n: None,
            m: None,
            r_sup: None,
            r: None,
            r1: None,
            c1: None,
            c2: None,
        }
    }
}

fn run_generalization(args: GenArgs) -> CmdResult<()> {
    let mut cfg: GenConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.kind, args.kind);
    set(&mut cfg.source_risk, args.source_risk.map(Some));
    set(&mut cfg.discrepancy, args.discrepancy.map(Some));
    set(&mut cfg.rad_source, args.rad_source.map(Some));
    set(&mut cfg.rad_target, args.rad_target.map(Some));
    set(&mut cfg.lambda, args.lambda);
    set(&mut cfg.delta, args.delta);
    set(&mut cfg.n, args.n.map(Some));
    set(&mut cfg.m, args.m.map(Some));
    set(&mut cfg.r_sup, args.r_sup.map(Some));
    set(&mut cfg.r, args.r.map(Some));
    set(&mut cfg.r1, args.r1.map(Some));
    set(&mut cfg.c1, args.c1.map(Some));
    set(&mut cfg.c2, args.c2.map(Some));

    let kind = GeneralizationKind::parse(&cfg.kind).map_err(|e| usage(e.to_string()))?;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("missing --{flag}")));
    let localized = matches!(
        kind,
        GeneralizationKind::Thm56LocalizedKl | GeneralizationKind::ThmD9Chi2
    );
    let params = if localized {
        let r = need(cfg.r, "r")?;
        let r1 = need(cfg.r1, "r1")?;
        let c1 = need(cfg.c1, "c1")?;
        let c2 = need(cfg.c2, "c2")?;
        Some(LocalizationParams::new(r1, r, c1, c2).map_err(|e| usage(e.to_string()))?)
    } else {
        None
    };
    let r_sup = if localized {
        Some(need(cfg.r_sup, "r-sup")?)
    } else {
        cfg.r_sup
    };
    let inputs = EmpiricalInputs {
        source_risk: need(cfg.source_risk, "source-risk")?,
        discrepancy: need(cfg.discrepancy, "discrepancy")?,
        rad_source: need(cfg.rad_source, "rad-source")?,
        rad_target: need(cfg.rad_target, "rad-target")?,
        lambda: cfg.lambda,
        r_sup,
        params,
        delta: cfg.delta,
        n: cfg.n.ok_or_else(|| usage("missing --n"))?,
        m: cfg.m.ok_or_else(|| usage("missing --m"))?,
    };
    let report = generalization_bound(kind, &inputs).map_err(numerical)?;
    emit_report(&cfg, &report, args.csv, args.out.as_deref())
}

// ---------------------------------------------------------------------------
// bounds fastrate

#[derive(Args)]
pub struct FastrateArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Disagreement-mean cap min{r1 + r, 1} in [0, 1].
    #[arg(long)]
    m: Option<f64>,
    /// Constant C2 in (0, 1).
    #[arg(long)]
    c2: Option<f64>,
    /// Emit CSV rows instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FastrateConfig {
    m: f64,
    c2: f64,
}

impl Default for FastrateConfig {
    fn default() -> Self {
        FastrateConfig { m: 1.0, c2: 0.1 }
    }
}

fn run_fastrate(args: FastrateArgs) -> CmdResult<()> {
    let mut cfg: FastrateConfig = load_config(args.config.as_deref())?;
    set(&mut cfg.m, args.m);
    set(&mut cfg.c2, args.c2);

    let solution = fastrate_constants(cfg.m, cfg.c2).map_err(numerical)?;
    log::info!("C1 = {}, coefficient = {}", solution.c1, solution.coefficient);
    if args.csv {
        let rows = vec![
            format!("c1,{}", solution.c1),
            format!("coefficient,{}", solution.coefficient),
            format!("degenerate,{}", solution.degenerate),
        ];
        emit_csv(&cfg, "component,value", &rows, args.out.as_deref())
    } else {
        emit_json(&cfg, &solution, args.out.as_deref())
    }
}
