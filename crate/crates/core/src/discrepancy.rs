//! Hypothesis-class discrepancies between a source and a target domain.
//!
//! All three families scan an auxiliary hypothesis h′ over a class and
//! reduce the witness g = ℓ(h, h′) through the variational objectives:
//!
//! - **absolute**: sup_{h′} |E_μ[g] − I_{φ,ν}(g)|, the shift-only inner
//!   value wrapped in |·| (no t scaling);
//! - **fdd**: sup_{h′, t} t·E_ν[g] − I_{φ,μ}(t·g), the scaled form; always
//!   ≥ 0 since t = 0 is feasible, and ≤ the exact f-divergence between the
//!   feature laws by data processing;
//! - **localized**: the same supremum with h′ restricted to a Rashomon set
//!   H_r = {h′ : R_μ(h′) ≤ r}, which is what the fast-rate bounds consume.
//!
//! The scale search runs over all reals by default; a non-negative or
//! pinned t is available through [`TRange`] since some bound statements
//! restrict t ≥ 0 while the worked 1-D reproductions optimise over ℝ
//! (their optima sit at negative t).
//!
//! Cumulant profiles expose K_{h′,μ}(t) = I_{φ,μ}(t·g) − t·E_μ[g] — for KL
//! exactly the centered cumulant generating function — and the envelope
//! K_μ(t) = sup_{h′} K_{h′,μ}(t) used by the change-of-measure bounds.
//!
//! Two backends: exhaustive enumeration (exact on finite classes, ties
//! broken towards the lowest index so results are schedule-independent)
//! and seeded gradient ascent for parametric witnesses (k inner ascent
//! steps on h′, then a scale refresh, per outer step).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::datasets::{Density, Domain};
use crate::error::{Error, Result};
use crate::hypotheses::{
    disagreement, risk, Hypothesis, HypothesisClass, LossKind, LossProfile, MlpGrads,
};
use crate::phi::{PhiKind, PhiSpec};
use crate::search::golden_max;
use crate::variational::{
    objective_at_t, scaled_objective, scaled_objective_clamped, shifted_objective,
    shifted_objective_searched, weighted_log_mean_exp, VariationalResult, WitnessValues,
};

/// Slack added to the Rashomon level when filtering risks.
pub const RASHOMON_TOL: f64 = 1e-12;

/// Scale range for the fdd supremum over t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TRange {
    AllReals,
    NonNeg,
    Fixed(f64),
}

impl TRange {
    /// Accepts `all`, `nonneg`, or `fixed:<t>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all" | "all_reals" => Ok(TRange::AllReals),
            "nonneg" => Ok(TRange::NonNeg),
            other => match other.strip_prefix("fixed:") {
                Some(t) => t
                    .parse::<f64>()
                    .map(TRange::Fixed)
                    .map_err(|_| Error::InvalidInput(format!("bad fixed scale `{t}`"))),
                None => Err(Error::InvalidInput(format!(
                    "unknown t-range `{other}` (expected all, nonneg, or fixed:<t>)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Absolute,
    Fdd,
    Localized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Enumerate,
    Adversarial,
}

/// Result of a discrepancy computation, with the achieving witness.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyEstimate {
    pub value: f64,
    /// Index into the enumerated class, when that backend ran.
    pub witness_index: Option<usize>,
    pub witness: Hypothesis,
    pub t_star: Option<f64>,
    pub alpha_star: Option<f64>,
    pub family: Family,
    pub backend: Backend,
    /// Whether any inner search ended pinned to a bracket edge.
    pub on_boundary: bool,
}

/// Members of a class whose source risk is at most the level r.
#[derive(Debug, Clone, Serialize)]
pub struct RashomonSet {
    pub level_r: f64,
    pub member_indices: Vec<usize>,
    /// Smallest source risk in the full class — reported so an empty set
    /// explains itself.
    pub min_risk: f64,
}

impl RashomonSet {
    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.member_indices.len()
    }

    fn require_members(&self) -> Result<&[usize]> {
        if self.is_empty() {
            return Err(Error::EmptyRashomonSet {
                level: self.level_r,
                min_risk: self.min_risk,
            });
        }
        Ok(&self.member_indices)
    }
}

fn enumerated_members(class: &HypothesisClass) -> Result<&[Hypothesis]> {
    class.members().ok_or_else(|| {
        Error::InvalidInput(
            "the enumeration backend needs an explicit member list; use the adversarial \
             backend for parametric families"
                .into(),
        )
    })
}

/// Distribution of ℓ(h, h′) with the p-side drawn from `p` and the q-side
/// from `q`.
fn pair_witness(
    h: &Hypothesis,
    h2: &Hypothesis,
    p: &Density,
    q: &Density,
    loss: LossKind,
) -> Result<WitnessValues> {
    let on_p = disagreement(h, h2, p, loss)?;
    let on_q = disagreement(h, h2, q, loss)?;
    WitnessValues::new(on_p.values, on_p.weights, on_q.values, on_q.weights)
}

/// sup_{h′} |E_μ[ℓ(h,h′)] − I_{φ,ν}(ℓ(h,h′))| over an enumerated class.
///
/// The inner value is the shift-only objective (no scale), so composite
/// kernels — which have no single conjugate — are rejected.
pub fn absolute_fdd(
    h: &Hypothesis,
    class: &HypothesisClass,
    mu: &Density,
    nu: &Density,
    phi: &PhiSpec,
) -> Result<DiscrepancyEstimate> {
    if phi.is_composite() {
        return Err(Error::CompositeKernel { kernel: phi.name() });
    }
    let members = enumerated_members(class)?;
    let mut best: Option<(usize, f64, VariationalResult)> = None;
    for (i, h2) in members.iter().enumerate() {
        let w = pair_witness(h, h2, mu, nu, class.loss)?;
        let inner = match phi.kind() {
            PhiKind::ReverseKl => shifted_objective_searched(&w, phi)?,
            _ => shifted_objective(&w, phi)?,
        };
        let cand = inner.value.abs();
        if best.as_ref().map_or(true, |(_, b, _)| cand > *b) {
            best = Some((i, cand, inner));
        }
    }
    let (idx, value, inner) =
        best.ok_or_else(|| Error::InvalidInput("empty hypothesis class".into()))?;
    Ok(DiscrepancyEstimate {
        value,
        witness_index: Some(idx),
        witness: members[idx].clone(),
        t_star: None,
        alpha_star: inner.alpha_star,
        family: Family::Absolute,
        backend: Backend::Enumerate,
        on_boundary: inner.on_boundary,
    })
}

fn scaled_over_range(w: &WitnessValues, phi: &PhiSpec, t_range: TRange) -> Result<VariationalResult> {
    match t_range {
        TRange::AllReals => scaled_objective(w, phi),
        TRange::NonNeg => scaled_objective_clamped(w, phi, Some(0.0), None),
        TRange::Fixed(t) => Ok(VariationalResult {
            value: objective_at_t(w, phi, t)?,
            alpha_star: None,
            t_star: Some(t),
            on_boundary: false,
        }),
    }
}

/// Core enumeration loop shared by [`fdd`] and [`localized_fdd`]: the
/// scaled objective per member, outer max with lowest-index tie-break.
pub fn fdd_over_witnesses(
    witnesses: &[(usize, WitnessValues)],
    members: &[Hypothesis],
    phi: &PhiSpec,
    t_range: TRange,
    family: Family,
) -> Result<DiscrepancyEstimate> {
    let mut best: Option<(usize, VariationalResult)> = None;
    for (idx, w) in witnesses {
        let res = scaled_over_range(w, phi, t_range)?;
        if best.as_ref().map_or(true, |(_, b)| res.value > b.value) {
            best = Some((*idx, res));
        }
    }
    let (idx, res) = best.ok_or_else(|| Error::InvalidInput("empty hypothesis class".into()))?;
    Ok(DiscrepancyEstimate {
        value: res.value,
        witness_index: Some(idx),
        witness: members[idx].clone(),
        t_star: res.t_star,
        alpha_star: res.alpha_star,
        family,
        backend: Backend::Enumerate,
        on_boundary: res.on_boundary,
    })
}

fn fdd_over_indices(
    h: &Hypothesis,
    class: &HypothesisClass,
    indices: &[usize],
    nu: &Density,
    mu: &Density,
    phi: &PhiSpec,
    t_range: TRange,
    family: Family,
) -> Result<DiscrepancyEstimate> {
    let members = enumerated_members(class)?;
    let witnesses = indices
        .iter()
        .map(|&i| Ok((i, pair_witness(h, &members[i], nu, mu, class.loss)?)))
        .collect::<Result<Vec<_>>>()?;
    fdd_over_witnesses(&witnesses, members, phi, t_range, family)
}

/// sup_{h′ ∈ H, t} t·E_ν[ℓ(h,h′)] − I_{φ,μ}(t·ℓ(h,h′)).
pub fn fdd(
    h: &Hypothesis,
    class: &HypothesisClass,
    nu: &Density,
    mu: &Density,
    phi: &PhiSpec,
    t_range: TRange,
) -> Result<DiscrepancyEstimate> {
    let n = enumerated_members(class)?.len();
    let all: Vec<usize> = (0..n).collect();
    fdd_over_indices(h, class, &all, nu, mu, phi, t_range, Family::Fdd)
}

/// Filter a class down to members with source risk ≤ r + 1e-12.
///
/// An empty result is returned as-is (with the minimum attainable risk
/// recorded); downstream consumers convert it into an error.
pub fn rashomon(class: &HypothesisClass, mu: &Domain, r: f64) -> Result<RashomonSet> {
    let members = enumerated_members(class)?;
    if members.is_empty() {
        return Err(Error::InvalidInput("empty hypothesis class".into()));
    }
    let mut indices = Vec::new();
    let mut min_risk = f64::INFINITY;
    for (i, h2) in members.iter().enumerate() {
        let risk_i = risk(h2, mu, class.loss)?;
        min_risk = min_risk.min(risk_i);
        if risk_i <= r + RASHOMON_TOL {
            indices.push(i);
        }
    }
    Ok(RashomonSet {
        level_r: r,
        member_indices: indices,
        min_risk,
    })
}

/// fdd restricted to h′ in the Rashomon set. The fixed hypothesis h must
/// itself sit inside the level-r1 set, which is checked here.
#[allow(clippy::too_many_arguments)]
pub fn localized_fdd(
    h: &Hypothesis,
    class: &HypothesisClass,
    rset: &RashomonSet,
    nu: &Density,
    mu: &Domain,
    phi: &PhiSpec,
    t_range: TRange,
    r1: f64,
) -> Result<DiscrepancyEstimate> {
    let own_risk = risk(h, mu, class.loss)?;
    if own_risk > r1 + RASHOMON_TOL {
        return Err(Error::BoundPrecondition(format!(
            "hypothesis has source risk {own_risk:.6}, outside the certified level r1 = {r1}"
        )));
    }
    let indices = rset.require_members()?;
    fdd_over_indices(
        h,
        class,
        indices,
        nu,
        mu.density(),
        phi,
        t_range,
        Family::Localized,
    )
}

/// R^r_μ(h) = sup_{h′ ∈ H_r} E_μ[ℓ(h, h′)], with the maximiser's index.
pub fn sup_source_disagreement(
    h: &Hypothesis,
    class: &HypothesisClass,
    rset: &RashomonSet,
    mu: &Density,
) -> Result<(f64, usize)> {
    let members = enumerated_members(class)?;
    let mut best: Option<(f64, usize)> = None;
    for &i in rset.require_members()? {
        let mean = disagreement(h, &members[i], mu, class.loss)?.mean();
        if best.map_or(true, |(b, _)| mean > b) {
            best = Some((mean, i));
        }
    }
    let (value, idx) = best.expect("nonempty by require_members");
    Ok((value, idx))
}

/// K_{h′,μ}(t) = I_{φ,μ}(t·ℓ) − t·E_μ[ℓ] for one loss profile under μ.
///
/// KL reduces to the centered cumulant generating function
/// ln E_μ[e^{tℓ}] − t·E_μ[ℓ] and χ² to t²·Var_μ(ℓ)/4; reverse KL runs the
/// bracketed shift search. K(0) = 0, K ≥ 0 (the integrand ψ* is
/// non-negative), and K is convex in t.
pub fn cumulant_value(profile: &LossProfile, phi: &PhiSpec, t: f64) -> Result<f64> {
    match phi.kind() {
        PhiKind::Kl => Ok(
            weighted_log_mean_exp(&profile.values, &profile.weights, t) - t * profile.mean(),
        ),
        PhiKind::Chi2 => Ok(t * t * profile.variance() / 4.0),
        PhiKind::ReverseKl => {
            let scaled: Vec<f64> = profile.values.iter().map(|v| t * v).collect();
            let w = WitnessValues::new(
                scaled.clone(),
                profile.weights.clone(),
                scaled,
                profile.weights.clone(),
            )?;
            // value = t·E_μ[ℓ] − I_{φ,μ}(tℓ), so K is its negation.
            Ok(-shifted_objective_searched(&w, phi)?.value)
        }
        PhiKind::Jeffreys { .. } => Err(Error::CompositeKernel { kernel: phi.name() }),
    }
}

/// Per-hypothesis cumulants K_{h′,μ} over a class (or a Rashomon subset)
/// plus their upper envelope K_μ.
#[derive(Debug, Clone)]
pub struct CumulantProfile {
    profiles: Vec<LossProfile>,
    /// Original class indices, parallel to the stored profiles.
    pub indices: Vec<usize>,
    phi: PhiSpec,
}

impl CumulantProfile {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// K for the stored profile at `position` (not the class index).
    pub fn per_hypothesis(&self, position: usize, t: f64) -> Result<f64> {
        cumulant_value(&self.profiles[position], &self.phi, t)
    }

    /// Envelope K_μ(t) = max over stored profiles, with the class index of
    /// the maximiser.
    pub fn envelope(&self, t: f64) -> Result<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (pos, profile) in self.profiles.iter().enumerate() {
            let k = cumulant_value(profile, &self.phi, t)?;
            if best.map_or(true, |(b, _)| k > b) {
                best = Some((k, self.indices[pos]));
            }
        }
        best.ok_or_else(|| Error::InvalidInput("empty cumulant profile".into()))
    }

    /// (mean, variance) of ℓ under μ per stored profile — the moments the
    /// χ² fast-rate feasibility check consumes.
    pub fn source_moments(&self) -> Vec<(f64, f64)> {
        self.profiles
            .iter()
            .map(|p| (p.mean(), p.variance()))
            .collect()
    }
}

/// Build K_{h′,μ} evaluators for every member (or only a Rashomon subset).
pub fn cumulant_profile(
    h: &Hypothesis,
    class: &HypothesisClass,
    subset: Option<&RashomonSet>,
    mu: &Density,
    phi: &PhiSpec,
) -> Result<CumulantProfile> {
    if phi.is_composite() {
        return Err(Error::CompositeKernel { kernel: phi.name() });
    }
    let members = enumerated_members(class)?;
    let indices: Vec<usize> = match subset {
        Some(rset) => rset.require_members()?.to_vec(),
        None => (0..members.len()).collect(),
    };
    let profiles = indices
        .iter()
        .map(|&i| disagreement(h, &members[i], mu, class.loss))
        .collect::<Result<Vec<_>>>()?;
    Ok(CumulantProfile {
        profiles,
        indices,
        phi: phi.clone(),
    })
}

/// Settings for the gradient backend.
#[derive(Debug, Clone)]
pub struct AdversarialOptions {
    pub outer_steps: usize,
    /// Ascent steps on the witness parameters per outer step.
    pub inner_steps: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Explicit starting witness; a class sample when absent.
    pub init: Option<Hypothesis>,
}

impl Default for AdversarialOptions {
    fn default() -> Self {
        AdversarialOptions {
            outer_steps: 200,
            inner_steps: 5,
            learning_rate: 0.01,
            seed: 0,
            init: None,
        }
    }
}

enum ParamGrads {
    Linear { w: Vec<f64>, b: f64 },
    Mlp(MlpGrads),
}

fn zero_grads(h2: &Hypothesis) -> Result<ParamGrads> {
    match h2 {
        Hypothesis::Linear { w, .. } => Ok(ParamGrads::Linear {
            w: vec![0.0; w.len()],
            b: 0.0,
        }),
        Hypothesis::Mlp(net) => Ok(ParamGrads::Mlp(net.zero_grads())),
        other => Err(Error::Incompatible {
            hypothesis: other.kind_name().into(),
            domain: "gradient ascent".into(),
        }),
    }
}

fn accumulate(h2: &Hypothesis, x: &[f64], upstream: f64, grads: &mut ParamGrads) {
    match (h2, grads) {
        (Hypothesis::Linear { .. }, ParamGrads::Linear { w, b }) => {
            for (gw, xi) in w.iter_mut().zip(x) {
                *gw += upstream * xi;
            }
            *b += upstream;
        }
        (Hypothesis::Mlp(net), ParamGrads::Mlp(g)) => net.accumulate_grads(x, upstream, g),
        _ => unreachable!("grads built from the same hypothesis"),
    }
}

fn apply_step(h2: &mut Hypothesis, step: f64, grads: &ParamGrads) {
    match (h2, grads) {
        (Hypothesis::Linear { w, b }, ParamGrads::Linear { w: gw, b: gb }) => {
            for (wi, g) in w.iter_mut().zip(gw) {
                *wi += step * g;
            }
            *b += step * gb;
        }
        (Hypothesis::Mlp(net), ParamGrads::Mlp(g)) => net.step(step, g),
        _ => unreachable!("grads built from the same hypothesis"),
    }
}

fn sample_points(density: &Density) -> Result<&[Vec<f64>]> {
    match density {
        Density::Sample { points } => Ok(points),
        _ => Err(Error::InvalidInput(
            "the adversarial backend needs sampled densities".into(),
        )),
    }
}

/// Per-point derivative weights of the scaled objective at fixed t, split
/// into the ν-side and μ-side coefficients multiplying ∂ℓ/∂θ. Shared with
/// the trainer, whose outer player differentiates the same objective.
pub(crate) fn objective_point_coeffs(
    phi: &PhiSpec,
    t: f64,
    losses_nu: &[f64],
    losses_mu: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = losses_nu.len() as f64;
    let m = losses_mu.len() as f64;
    let softmax = |values: &[f64], scale: f64| -> Vec<f64> {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = values.iter().map(|v| (scale * (v - max)).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / total).collect()
    };
    match phi.kind() {
        PhiKind::Kl => {
            let soft = softmax(losses_mu, t);
            (
                vec![t / n; losses_nu.len()],
                soft.into_iter().map(|s| -t * s).collect(),
            )
        }
        PhiKind::Chi2 => {
            let mean_mu = losses_mu.iter().sum::<f64>() / m;
            (
                vec![t / n; losses_nu.len()],
                losses_mu
                    .iter()
                    .map(|l| -(t + t * t / 2.0 * (l - mean_mu)) / m)
                    .collect(),
            )
        }
        PhiKind::ReverseKl => {
            let soft = softmax(losses_nu, t);
            (
                soft.into_iter().map(|s| -t * s).collect(),
                vec![t / m; losses_mu.len()],
            )
        }
        PhiKind::Jeffreys {
            gamma_fwd,
            gamma_rev,
        } => {
            let (fwd_nu, fwd_mu) = objective_point_coeffs(&PhiSpec::kl(), t, losses_nu, losses_mu);
            let (rev_nu, rev_mu) =
                objective_point_coeffs(&PhiSpec::reverse_kl(), t, losses_nu, losses_mu);
            (
                fwd_nu
                    .iter()
                    .zip(&rev_nu)
                    .map(|(f, r)| gamma_fwd * f + gamma_rev * r)
                    .collect(),
                fwd_mu
                    .iter()
                    .zip(&rev_mu)
                    .map(|(f, r)| gamma_fwd * f + gamma_rev * r)
                    .collect(),
            )
        }
    }
}

/// Gradient backend for fdd over a parametric witness family: per outer
/// step one scale refresh (closed form for χ², a golden-section pass
/// otherwise), then `inner_steps` ascent steps on the witness parameters
/// at that frozen scale. Deterministic given the seed.
pub fn fdd_adversarial(
    h: &Hypothesis,
    class: &HypothesisClass,
    nu: &Density,
    mu: &Density,
    phi: &PhiSpec,
    t_range: TRange,
    opts: &AdversarialOptions,
) -> Result<DiscrepancyEstimate> {
    if class.loss.grad(0.0, 0.0).is_none() {
        return Err(Error::InvalidInput(format!(
            "loss `{}` is not differentiable; the adversarial backend needs gradients",
            class.loss.name()
        )));
    }
    let points_nu = sample_points(nu)?;
    let points_mu = sample_points(mu)?;
    let mut witness = match &opts.init {
        Some(w) => w.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            class.sample_member(&mut rng)
        }
    };
    zero_grads(&witness)?; // reject non-parametric witnesses up front

    let raw_h_nu: Vec<f64> = points_nu
        .iter()
        .map(|x| h.raw_score(x))
        .collect::<Result<_>>()?;
    let raw_h_mu: Vec<f64> = points_mu
        .iter()
        .map(|x| h.raw_score(x))
        .collect::<Result<_>>()?;

    let losses_of = |w: &Hypothesis| -> Result<(Vec<f64>, Vec<f64>)> {
        let lnu = points_nu
            .iter()
            .zip(&raw_h_nu)
            .map(|(x, rh)| Ok(class.loss.eval(*rh, w.raw_score(x)?)))
            .collect::<Result<Vec<f64>>>()?;
        let lmu = points_mu
            .iter()
            .zip(&raw_h_mu)
            .map(|(x, rh)| Ok(class.loss.eval(*rh, w.raw_score(x)?)))
            .collect::<Result<Vec<f64>>>()?;
        Ok((lnu, lmu))
    };

    let refresh_t = |losses_nu: &[f64], losses_mu: &[f64], current: f64| -> f64 {
        match t_range {
            TRange::Fixed(t) => t,
            TRange::AllReals | TRange::NonNeg => {
                let t = match phi.kind() {
                    PhiKind::Chi2 => {
                        let mn = losses_nu.iter().sum::<f64>() / losses_nu.len() as f64;
                        let mm = losses_mu.iter().sum::<f64>() / losses_mu.len() as f64;
                        let var = losses_mu.iter().map(|l| (l - mm) * (l - mm)).sum::<f64>()
                            / losses_mu.len() as f64;
                        if var < 1e-12 {
                            current
                        } else {
                            2.0 * (mn - mm) / var
                        }
                    }
                    _ => {
                        let lme = |vals: &[f64], t: f64| {
                            let n = vals.len() as f64;
                            weighted_log_mean_exp(vals, &vec![1.0 / n; vals.len()], t)
                        };
                        let mn = losses_nu.iter().sum::<f64>() / losses_nu.len() as f64;
                        let mm = losses_mu.iter().sum::<f64>() / losses_mu.len() as f64;
                        let obj = |t: f64| match phi.kind() {
                            PhiKind::ReverseKl => t * mm - lme(losses_nu, t),
                            PhiKind::Jeffreys {
                                gamma_fwd,
                                gamma_rev,
                            } => {
                                gamma_fwd * (t * mn - lme(losses_mu, t))
                                    + gamma_rev * (t * mm - lme(losses_nu, t))
                            }
                            _ => t * mn - lme(losses_mu, t),
                        };
                        golden_max(obj, -50.0, 50.0).x
                    }
                };
                if matches!(t_range, TRange::NonNeg) {
                    t.max(0.0)
                } else {
                    t
                }
            }
        }
    };

    let (mut losses_nu, mut losses_mu) = losses_of(&witness)?;
    let mut t = refresh_t(&losses_nu, &losses_mu, 1.0);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_state: Option<(Hypothesis, f64)> = None;

    for _ in 0..opts.outer_steps {
        for _ in 0..opts.inner_steps {
            let (coeff_nu, coeff_mu) = objective_point_coeffs(phi, t, &losses_nu, &losses_mu);
            let mut grads = zero_grads(&witness)?;
            for ((x, rh), c) in points_nu.iter().zip(&raw_h_nu).zip(&coeff_nu) {
                let rw = witness.raw_score(x)?;
                let (_, d2) = class.loss.grad(*rh, rw).expect("checked differentiable");
                accumulate(&witness, x, c * d2, &mut grads);
            }
            for ((x, rh), c) in points_mu.iter().zip(&raw_h_mu).zip(&coeff_mu) {
                let rw = witness.raw_score(x)?;
                let (_, d2) = class.loss.grad(*rh, rw).expect("checked differentiable");
                accumulate(&witness, x, c * d2, &mut grads);
            }
            apply_step(&mut witness, opts.learning_rate, &grads);
            let updated = losses_of(&witness)?;
            losses_nu = updated.0;
            losses_mu = updated.1;
        }
        t = refresh_t(&losses_nu, &losses_mu, t);
        let n = losses_nu.len() as f64;
        let m = losses_mu.len() as f64;
        let w = WitnessValues::new(
            losses_nu.clone(),
            vec![1.0 / n; losses_nu.len()],
            losses_mu.clone(),
            vec![1.0 / m; losses_mu.len()],
        )?;
        let value = objective_at_t(&w, phi, t)?;
        if value > best_value {
            best_value = value;
            best_state = Some((witness.clone(), t));
        }
    }

    let (witness, t_star) =
        best_state.ok_or_else(|| Error::InvalidInput("no adversarial steps ran".into()))?;
    Ok(DiscrepancyEstimate {
        value: best_value,
        witness_index: None,
        witness,
        t_star: Some(t_star),
        alpha_star: None,
        family: Family::Fdd,
        backend: Backend::Adversarial,
        on_boundary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::threshold_domains;
    use crate::hypotheses::HypothesisClass;
    use crate::phi::DiscreteDistribution;

    const LN_3: f64 = 1.0986122886681098;

    fn threshold_setup() -> (Hypothesis, HypothesisClass, Density, Density) {
        let pair = threshold_domains();
        let class = HypothesisClass::threshold_grid(0.0, 0.5, 101, LossKind::ZeroOne);
        let mu = pair.source().density().clone();
        let nu = pair.target_density().clone();
        (Hypothesis::Threshold { c: 0.5 }, class, mu, nu)
    }

    #[test]
    fn threshold_fdd_kl_matches_the_bernoulli_oracle() {
        // Optimal witness is the farthest threshold c = 0: the loss is
        // Bernoulli(1/2) under μ and Bernoulli(1/4) under ν, and the scaled
        // objective attains KL(Bern(1/4) ‖ Bern(1/2)) = 0.130812035941137
        // at t = −ln 3.
        let (h, class, mu, nu) = threshold_setup();
        let est = fdd(&h, &class, &nu, &mu, &PhiSpec::kl(), TRange::AllReals).unwrap();
        assert!((est.value - 0.130_812_035_941_137).abs() < 1e-9);
        assert_eq!(est.witness_index, Some(0));
        assert_eq!(est.witness, Hypothesis::Threshold { c: 0.0 });
        assert!((est.t_star.unwrap() + LN_3).abs() < 1e-6);
        assert!(!est.on_boundary);
    }

    #[test]
    fn fdd_vanishes_on_matched_domains() {
        let (h, class, mu, _) = threshold_setup();
        for phi in [PhiSpec::kl(), PhiSpec::chi2(), PhiSpec::jeffreys(0.5, 0.5).unwrap()] {
            let est = fdd(&h, &class, &mu.clone(), &mu, &phi, TRange::AllReals).unwrap();
            assert!(
                est.value.abs() < 1e-9,
                "{}: {}",
                phi.name(),
                est.value
            );
        }
    }

    #[test]
    fn rashomon_filters_by_source_risk() {
        // R_μ(h_c) = 1/2 − c on the grid over [0, 1/2], so the level-1/4
        // set is {c ≥ 1/4}: grid indices 50..=100.
        let (_, class, _, _) = threshold_setup();
        let mu = threshold_domains().source().clone();
        let rset = rashomon(&class, &mu, 0.25).unwrap();
        assert_eq!(rset.member_indices.len(), 51);
        assert_eq!(rset.member_indices[0], 50);
        assert_eq!(*rset.member_indices.last().unwrap(), 100);
        assert_eq!(rset.min_risk, 0.0);

        // Level below the minimum attainable risk: empty but explained.
        let narrow = HypothesisClass::threshold_grid(0.0, 0.4, 41, LossKind::ZeroOne);
        let empty = rashomon(&narrow, &mu, 0.05).unwrap();
        assert!(empty.is_empty());
        assert!((empty.min_risk - 0.1).abs() < 1e-12);

        // Level above the maximum: everything qualifies.
        let all = rashomon(&class, &mu, 0.5).unwrap();
        assert_eq!(all.len(), 101);
    }

    #[test]
    fn localized_fdd_reproduces_the_worked_value() {
        // At r = 1/4 the best witness is c = 1/4: Bernoulli(1/8) vs
        // Bernoulli(1/4) gives KL = 0.0482384472788579 at t = ln(3/7).
        let (h, class, _, nu) = threshold_setup();
        let mu = threshold_domains().source().clone();
        let rset = rashomon(&class, &mu, 0.25).unwrap();
        let est = localized_fdd(
            &h,
            &class,
            &rset,
            &nu,
            &mu,
            &PhiSpec::kl(),
            TRange::AllReals,
            0.25,
        )
        .unwrap();
        assert!((est.value - 0.048_238_447_278_857_9).abs() < 1e-9);
        assert_eq!(est.witness, Hypothesis::Threshold { c: 0.25 });
        assert!((est.t_star.unwrap() - (3.0f64 / 7.0).ln()).abs() < 1e-6);

        // Restricting the scale to t ≥ 0 pins the optimum at t = 0.
        let pinned = localized_fdd(
            &h,
            &class,
            &rset,
            &nu,
            &mu,
            &PhiSpec::kl(),
            TRange::NonNeg,
            0.25,
        )
        .unwrap();
        assert_eq!(pinned.value, 0.0);
        assert_eq!(pinned.t_star, Some(0.0));

        // r → 0 leaves only the truth; every localized quantity vanishes.
        let tiny = rashomon(&class, &mu, 0.0).unwrap();
        assert_eq!(tiny.member_indices, vec![100]);
        let zero = localized_fdd(
            &h,
            &class,
            &tiny,
            &nu,
            &mu,
            &PhiSpec::kl(),
            TRange::AllReals,
            0.0,
        )
        .unwrap();
        assert!(zero.value.abs() < 1e-12);
        let (sup, _) = sup_source_disagreement(&h, &class, &tiny, mu.density()).unwrap();
        assert_eq!(sup, 0.0);
    }

    #[test]
    fn localized_fdd_certifies_the_fixed_hypothesis() {
        let (_, class, _, nu) = threshold_setup();
        let mu = threshold_domains().source().clone();
        let rset = rashomon(&class, &mu, 0.25).unwrap();
        // h_0 has source risk 1/2 > r1 = 1/4.
        let outsider = Hypothesis::Threshold { c: 0.0 };
        let err = localized_fdd(
            &outsider,
            &class,
            &rset,
            &nu,
            &mu,
            &PhiSpec::kl(),
            TRange::AllReals,
            0.25,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BoundPrecondition(_)));
    }

    #[test]
    fn sup_source_disagreement_thresholds() {
        let (h, class, mu, _) = threshold_setup();
        let mu_domain = threshold_domains().source().clone();
        let quarter = rashomon(&class, &mu_domain, 0.25).unwrap();
        let (value, idx) = sup_source_disagreement(&h, &class, &quarter, &mu).unwrap();
        assert_eq!(value, 0.25);
        assert_eq!(idx, 50); // c = 1/4

        let full = rashomon(&class, &mu_domain, 0.5).unwrap();
        let (value, idx) = sup_source_disagreement(&h, &class, &full, &mu).unwrap();
        assert_eq!(value, 0.5);
        assert_eq!(idx, 0); // c = 0
    }

    #[test]
    fn localized_is_monotone_in_r_and_dominated_by_fdd() {
        let (h, class, mu, nu) = threshold_setup();
        let mu_domain = threshold_domains().source().clone();
        let phi = PhiSpec::kl();
        let mut previous = 0.0;
        for r in [0.05, 0.1, 0.25, 0.4, 0.5] {
            let rset = rashomon(&class, &mu_domain, r).unwrap();
            let est = localized_fdd(
                &h,
                &class,
                &rset,
                &nu,
                &mu_domain,
                &phi,
                TRange::AllReals,
                0.5,
            )
            .unwrap();
            assert!(
                est.value >= previous - 1e-12,
                "not monotone at r={r}: {} < {previous}",
                est.value
            );
            previous = est.value;
        }
        let full = fdd(&h, &class, &nu, &mu, &phi, TRange::AllReals).unwrap();
        assert!(previous <= full.value + 1e-12);
    }

    #[test]
    fn absolute_fdd_matches_an_in_test_grid_oracle() {
        // Independent oracle: for each grid threshold the loss is
        // Bernoulli(p_μ) under μ and Bernoulli(p_ν) under ν, and the KL
        // inner value is E_μ[g] − ln E_ν[e^g] at g = the 0/1 loss.
        let (h, class, mu, nu) = threshold_setup();
        let est = absolute_fdd(&h, &class, &mu, &nu, &PhiSpec::kl()).unwrap();
        let mut oracle = f64::NEG_INFINITY;
        for i in 0..=100 {
            let c = 0.5 * i as f64 / 100.0;
            let p_mu = 0.5 - c;
            let p_nu = (0.5 - c) / 2.0;
            let inner = p_mu - (p_nu * std::f64::consts::E + (1.0 - p_nu)).ln();
            oracle = oracle.max(inner.abs());
        }
        assert!((est.value - oracle).abs() < 1e-12);

        // Matched domains with h in the class: the h′ = h witness gives 0,
        // and the supremum stays non-negative.
        let same = absolute_fdd(&h, &class, &mu, &mu, &PhiSpec::kl()).unwrap();
        assert!(same.value >= 0.0);
    }

    #[test]
    fn absolute_fdd_rejects_composite_kernels() {
        let (h, class, mu, nu) = threshold_setup();
        let phi = PhiSpec::jeffreys(1.0, 1.0).unwrap();
        assert!(matches!(
            absolute_fdd(&h, &class, &mu, &nu, &phi),
            Err(Error::CompositeKernel { .. })
        ));
    }

    #[test]
    fn fdd_is_dominated_by_the_exact_divergence() {
        // Data processing: the pushforward of any witness loss cannot carry
        // more divergence than the feature laws themselves.
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let raw_mu: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..1.0)).collect();
            let raw_nu: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..1.0)).collect();
            let norm = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                v.iter().map(|x| x / s).collect::<Vec<f64>>()
            };
            let probs_mu = norm(&raw_mu);
            let probs_nu = norm(&raw_nu);
            let mu = Density::Discrete {
                probs: probs_mu.clone(),
            };
            let nu = Density::Discrete {
                probs: probs_nu.clone(),
            };
            let h = Hypothesis::Table {
                scores: vec![1.0, 0.0, 1.0],
            };
            let members: Vec<Hypothesis> = (0..8)
                .map(|k| Hypothesis::Table {
                    scores: (0..3).map(|a| ((k >> a) & 1) as f64).collect(),
                })
                .collect();
            let class = HypothesisClass::enumerated(members, LossKind::ZeroOne);
            for phi in [PhiSpec::kl(), PhiSpec::chi2()] {
                let est = fdd(&h, &class, &nu, &mu, &phi, TRange::AllReals).unwrap();
                let exact = crate::phi::exact_f_divergence(
                    &DiscreteDistribution::from_probs(probs_nu.clone()).unwrap(),
                    &DiscreteDistribution::from_probs(probs_mu.clone()).unwrap(),
                    &phi,
                )
                .unwrap();
                assert!(
                    est.value <= exact + 1e-9,
                    "trial {trial} {}: fdd {} > exact {exact}",
                    phi.name(),
                    est.value
                );
                assert!(est.value >= -1e-12);
            }
        }
    }

    #[test]
    fn change_of_measure_chain_holds_on_a_t_grid() {
        // t·(E_ν − E_μ) − K_μ(t) ≤ fdd for every member and scale.
        let (h, class, mu, nu) = threshold_setup();
        let phi = PhiSpec::kl();
        let est = fdd(&h, &class, &nu, &mu, &phi, TRange::AllReals).unwrap();
        let profile = cumulant_profile(&h, &class, None, &mu, &phi).unwrap();
        let members = class.members().unwrap();
        for (pos, h2) in members.iter().enumerate() {
            let mean_nu = disagreement(&h, h2, &nu, class.loss).unwrap().mean();
            let mean_mu = disagreement(&h, h2, &mu, class.loss).unwrap().mean();
            for k in 0..50 {
                let t = -5.0 + 10.0 * k as f64 / 49.0;
                let k_t = profile.per_hypothesis(pos, t).unwrap();
                let lhs = t * (mean_nu - mean_mu) - k_t;
                assert!(
                    lhs <= est.value + 1e-9,
                    "member {pos}, t={t}: {lhs} > {}",
                    est.value
                );
            }
        }
    }

    #[test]
    fn cumulant_matches_the_bernoulli_closed_form() {
        // ℓ ~ Bernoulli(q) under μ: K(t) = ln(1−q+q·e^t) − t·q for KL.
        let profile = LossProfile {
            values: vec![1.0, 0.0],
            weights: vec![0.3, 0.7],
        };
        let phi = PhiSpec::kl();
        for k in 0..21 {
            let t = -5.0 + 0.5 * k as f64;
            let got = cumulant_value(&profile, &phi, t).unwrap();
            let expect = (0.7 + 0.3 * t.exp()).ln() - 0.3 * t;
            assert!((got - expect).abs() < 1e-12, "t={t}");
        }
        assert_eq!(cumulant_value(&profile, &phi, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn cumulant_envelope_is_nonneg_convex_and_quadratically_bounded() {
        let (h, class, mu, _) = threshold_setup();
        for phi in [PhiSpec::kl(), PhiSpec::chi2()] {
            let profile = cumulant_profile(&h, &class, None, &mu, &phi).unwrap();
            let curvature = phi.curvature_at_one();
            let grid: Vec<f64> = (0..50).map(|k| -5.0 + 10.0 * k as f64 / 49.0).collect();
            let envelope: Vec<f64> = grid
                .iter()
                .map(|&t| profile.envelope(t).unwrap().0)
                .collect();
            for (i, (&t, &k)) in grid.iter().zip(&envelope).enumerate() {
                assert!(k >= -1e-12, "{} K({t}) = {k}", phi.name());
                assert!(
                    k <= t * t / (2.0 * curvature) + 1e-9,
                    "{} K({t}) = {k} above the quadratic cap",
                    phi.name()
                );
                if i > 0 && i + 1 < grid.len() {
                    // Midpoint convexity across the uniform grid.
                    assert!(
                        2.0 * k <= envelope[i - 1] + envelope[i + 1] + 1e-9,
                        "{} not convex at t={t}",
                        phi.name()
                    );
                }
            }
            let (at_zero, _) = profile.envelope(0.0).unwrap();
            assert!(at_zero.abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_the_loss_rescales_t_but_not_the_value() {
        // λ·ℓ spans the same witness set: value identical, t* divided by λ.
        let lambda = 3.7;
        let base = WitnessValues::new(
            vec![1.0, 0.0],
            vec![0.25, 0.75],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
        )
        .unwrap();
        let scaled = WitnessValues::new(
            vec![lambda, 0.0],
            vec![0.25, 0.75],
            vec![lambda, 0.0],
            vec![0.5, 0.5],
        )
        .unwrap();
        let members = vec![Hypothesis::Threshold { c: 0.0 }];
        for phi in [PhiSpec::kl(), PhiSpec::chi2()] {
            let a = fdd_over_witnesses(
                &[(0, base.clone())],
                &members,
                &phi,
                TRange::AllReals,
                Family::Fdd,
            )
            .unwrap();
            let b = fdd_over_witnesses(
                &[(0, scaled.clone())],
                &members,
                &phi,
                TRange::AllReals,
                Family::Fdd,
            )
            .unwrap();
            assert!((a.value - b.value).abs() < 1e-9, "{}", phi.name());
            assert!(
                (a.t_star.unwrap() - lambda * b.t_star.unwrap()).abs() < 1e-6,
                "{}",
                phi.name()
            );
        }
    }

    #[test]
    fn enumeration_and_ascent_backends_agree_on_an_embedded_class() {
        // Two overlapping 1-D Gaussian clouds and a nine-member linear
        // class. The first member's parameters are the ascent fixed point
        // for this instance (found once by running the ascent to
        // convergence and freezing the coordinates; its objective there is
        // 1.693441195311349 with an interior scale t ≈ 14.1); the other
        // eight are spread across the same basin with values at least
        // 0.015 lower. Gradient ascent over the full linear family starts
        // at the member worth 0.83, so agreement within 1e-3 requires the
        // ascent to actually climb.
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut draw = |center: f64| -> Vec<Vec<f64>> {
            (0..40)
                .map(|_| {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    vec![center + 0.6 * z]
                })
                .collect()
        };
        let mu = Density::Sample { points: draw(0.0) };
        let nu = Density::Sample { points: draw(0.8) };
        let h = Hypothesis::Linear {
            w: vec![1.0],
            b: 0.0,
        };
        let phi = PhiSpec::kl();
        let params = [
            (-0.311629025249378, -0.555998001394593),
            (0.5, 0.0),
            (-1.0, 0.5),
            (0.0, -1.0),
            (-0.5, -0.5),
            (-0.31, 0.0),
            (1.0, 0.0),
            (-2.0, -1.0),
            (0.0, 0.0),
        ];
        let members: Vec<Hypothesis> = params
            .iter()
            .map(|&(wv, bv)| Hypothesis::Linear {
                w: vec![wv],
                b: bv,
            })
            .collect();
        let finite = HypothesisClass::enumerated(members, LossKind::BoundedSigmoid);
        let enumerated = fdd(&h, &finite, &nu, &mu, &phi, TRange::AllReals).unwrap();
        assert_eq!(enumerated.witness_index, Some(0));

        let parametric = HypothesisClass {
            family: crate::hypotheses::ClassFamily::LinearDraws {
                dim: 1,
                scale: 1.0,
            },
            loss: LossKind::BoundedSigmoid,
        };
        let opts = AdversarialOptions {
            outer_steps: 1200,
            init: Some(Hypothesis::Linear {
                w: vec![0.5],
                b: 0.0,
            }),
            ..Default::default()
        };
        let ascent =
            fdd_adversarial(&h, &parametric, &nu, &mu, &phi, TRange::AllReals, &opts).unwrap();
        assert_eq!(ascent.backend, Backend::Adversarial);
        assert!(
            (enumerated.value - ascent.value).abs() < 1e-3,
            "enumeration {} vs ascent {}",
            enumerated.value,
            ascent.value
        );
    }

    #[test]
    fn fixed_scale_reduces_to_the_pointwise_objective() {
        let (h, class, mu, nu) = threshold_setup();
        let phi = PhiSpec::kl();
        let est = fdd(&h, &class, &nu, &mu, &phi, TRange::Fixed(1.0)).unwrap();
        let members = class.members().unwrap();
        let manual = members
            .iter()
            .map(|h2| {
                let w = pair_witness(&h, h2, &nu, &mu, class.loss).unwrap();
                objective_at_t(&w, &phi, 1.0).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((est.value - manual).abs() < 1e-15);
        assert_eq!(est.t_star, Some(1.0));
    }
}
