//! Adversarial representation training against divergence discrepancies.
//!
//! The model is a two-head network: a shared leaky-ReLU representation, a
//! classifier head producing the score the risk is measured on, and an
//! adversary head whose disagreement with the classifier drives the
//! discrepancy estimate. Training alternates two phases per outer step:
//!
//! - inner: `inner_steps` gradient-ascent steps on the adversary head
//!   alone (representation and classifier frozen), pushing the chosen
//!   discrepancy objective `d` up at a scale `t` frozen for the whole step;
//! - outer: one descent step on representation + classifier against
//!   R̂_source(h) + η·d. The adversary's parameters are frozen, but the
//!   gradient flows through both score paths, because the adversary reads
//!   the shared representation too — the explicit two-phase form of the
//!   usual gradient-reversal trick, kept explicit for determinism.
//!
//! The maximized objective is the shifted variational form
//! d(h,h′) = E_target[t·ℓ̂] − I_{φ,source}(t·ℓ̂), which the `abs_*`
//! variants replace with |E_target[ℓ̂] − E_source[φ*(ℓ̂)]| — the absolute
//! plain-conjugate form, retained deliberately because maximizing it can
//! overshoot the divergence and blow up; the explosion flag records that.
//! Scale selection is `t = 1` by default; the `opt*` variants refresh t
//! per outer step from a quadratic approximation (KL) or the closed form
//! (χ²), falling back to t = 1 with a counter on degenerate batches.
//! The `jeffreys` composite maximizes each direction at its own scale
//! (losses are non-negative, so a single shared scale would cancel the
//! two directions against each other); its logged scale is the feasible
//! placeholder 1.
//!
//! Batches are the full sample (capped at 2048 per domain): no minibatch
//! order to randomize, so a seed pins the whole trajectory bitwise. Target
//! labels are never read during training; accuracy metrics are computed
//! post-hoc from per-step classifier snapshots, so a blinded domain pair
//! produces an identical run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datasets::{Density, Domain, DomainPair, Truth};
use crate::discrepancy::objective_point_coeffs;
use crate::error::{Error, Result};
use crate::hypotheses::{
    accuracy, leaky_relu, leaky_relu_deriv, Hypothesis, HypothesisClass, LossKind, MlpNet,
};
use crate::phi::{exact_f_divergence, DiscreteDistribution, PhiKind, PhiSpec};
use crate::variational::{
    lt_objective, objective_at_t, optimal_t_chi2, optimal_t_kl_approx, scaled_objective_clamped,
    shifted_objective, WitnessValues,
};

/// |d| beyond this halts the run with the explosion flag set.
pub const EXPLOSION_LIMIT: f64 = 1e6;
/// Full-batch training only; larger samples are refused, not subsampled.
pub const MAX_BATCH: usize = 2048;
/// Per-direction scale searches are bracketed in [-50, 50] to keep exp(t·ℓ) sane.
const SCALE_CLAMP: f64 = 50.0;
/// Trust region for the per-step scale refresh. Both refresh formulas model
/// the objective only near the t = 1 anchor; a raw refresh far outside that
/// neighborhood lets the scale and the ascending witness chase each other
/// into overflow, so the value is pulled back into a moderate range. The
/// exponential family stays in the positive regime of its anchor; the
/// quadratic family's maximizer is legitimately signed.
const REFRESH_TRUST_KL: (f64, f64) = (0.25, 4.0);
const REFRESH_TRUST_CHI2: (f64, f64) = (-4.0, 4.0);

/// Which discrepancy the adversary estimates and the learner suppresses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discrepancy {
    Kl,
    Chi2,
    Jeffreys { gamma_fwd: f64, gamma_rev: f64 },
    AbsKl,
    AbsChi2,
    OptKl,
    OptChi2,
}

impl Discrepancy {
    /// Accepts `kl`, `chi2`, `jeffreys:G1,G2`, `abs_kl`, `abs_chi2`,
    /// `optkl`, `optchi2`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "kl" => return Ok(Discrepancy::Kl),
            "chi2" => return Ok(Discrepancy::Chi2),
            "abs_kl" => return Ok(Discrepancy::AbsKl),
            "abs_chi2" => return Ok(Discrepancy::AbsChi2),
            "optkl" => return Ok(Discrepancy::OptKl),
            "optchi2" => return Ok(Discrepancy::OptChi2),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("jeffreys:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() == 2 {
                let g1 = parts[0].trim().parse::<f64>();
                let g2 = parts[1].trim().parse::<f64>();
                if let (Ok(g1), Ok(g2)) = (g1, g2) {
                    return Ok(Discrepancy::Jeffreys {
                        gamma_fwd: g1,
                        gamma_rev: g2,
                    });
                }
            }
        }
        Err(Error::InvalidInput(format!(
            "unknown discrepancy `{s}` (expected kl, chi2, jeffreys:G1,G2, abs_kl, abs_chi2, optkl, optchi2)"
        )))
    }

    pub fn name(&self) -> String {
        match self {
            Discrepancy::Kl => "kl".into(),
            Discrepancy::Chi2 => "chi2".into(),
            Discrepancy::Jeffreys {
                gamma_fwd,
                gamma_rev,
            } => format!("jeffreys:{gamma_fwd},{gamma_rev}"),
            Discrepancy::AbsKl => "abs_kl".into(),
            Discrepancy::AbsChi2 => "abs_chi2".into(),
            Discrepancy::OptKl => "optkl".into(),
            Discrepancy::OptChi2 => "optchi2".into(),
        }
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, Discrepancy::AbsKl | Discrepancy::AbsChi2)
    }

    fn forces_optimized(&self) -> bool {
        matches!(self, Discrepancy::OptKl | Discrepancy::OptChi2)
    }

    /// Divergence kernel behind the variant.
    pub fn kernel(&self) -> Result<PhiSpec> {
        match self {
            Discrepancy::Kl | Discrepancy::AbsKl | Discrepancy::OptKl => Ok(PhiSpec::kl()),
            Discrepancy::Chi2 | Discrepancy::AbsChi2 | Discrepancy::OptChi2 => Ok(PhiSpec::chi2()),
            Discrepancy::Jeffreys {
                gamma_fwd,
                gamma_rev,
            } => PhiSpec::jeffreys(*gamma_fwd, *gamma_rev),
        }
    }
}

/// Scale policy: pin t = 1 or refresh it per outer step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TMode {
    FixedOne,
    Optimized,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub discrepancy: Discrepancy,
    /// Trade-off weight η on the discrepancy term.
    pub eta: f64,
    pub t_mode: TMode,
    /// Adversary ascent steps per outer step (k ≥ 1).
    pub inner_steps: usize,
    pub outer_steps: usize,
    pub outer_lr: f64,
    pub inner_lr: f64,
    pub seed: u64,
    /// Differentiable loss scoring the two heads' disagreement and the
    /// source fit. The default is the unbounded smooth surrogate.
    pub surrogate: LossKind,
    /// Width of the shared representation.
    pub hidden: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            discrepancy: Discrepancy::Kl,
            eta: 1.0,
            t_mode: TMode::FixedOne,
            inner_steps: 5,
            outer_steps: 300,
            outer_lr: 0.05,
            inner_lr: 0.05,
            seed: 0,
            surrogate: LossKind::Surrogate,
            hidden: 16,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.inner_steps == 0 {
            return Err(Error::InvalidInput("inner_steps must be at least 1".into()));
        }
        if !(self.outer_lr > 0.0) || !(self.inner_lr > 0.0) {
            return Err(Error::InvalidInput("learning rates must be positive".into()));
        }
        if self.hidden == 0 {
            return Err(Error::InvalidInput("hidden width must be at least 1".into()));
        }
        if self.surrogate.grad(0.0, 0.0).is_none() {
            return Err(Error::InvalidInput(format!(
                "surrogate `{}` is not differentiable; training needs gradients",
                self.surrogate.name()
            )));
        }
        self.discrepancy.kernel()?;
        if self.t_mode == TMode::Optimized {
            match self.discrepancy {
                Discrepancy::Kl | Discrepancy::Chi2 | Discrepancy::OptKl | Discrepancy::OptChi2 => {}
                Discrepancy::Jeffreys { .. } => {
                    return Err(Error::InvalidInput(
                        "the jeffreys composite already scales each direction internally"
                            .into(),
                    ))
                }
                Discrepancy::AbsKl | Discrepancy::AbsChi2 => {
                    return Err(Error::InvalidInput(
                        "absolute variants have no scale parameter to optimize".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Whether the scale is refreshed per step (the opt* variants force it).
    pub fn scale_refresh(&self) -> bool {
        self.discrepancy.forces_optimized()
            || (self.t_mode == TMode::Optimized && !self.discrepancy.is_abs())
    }
}

/// Shared representation plus classifier and adversary heads.
#[derive(Debug, Clone, Serialize)]
pub struct TwoHeadModel {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub cls_w: Vec<f64>,
    pub cls_b: f64,
    pub aux_w: Vec<f64>,
    pub aux_b: f64,
}

/// Forward pass cache for one point: activations and both head scores.
struct PointCache {
    a: Vec<f64>,
    r1: f64,
    r2: f64,
}

impl TwoHeadModel {
    /// Gaussian init scaled by 1/√fan_in; biases start at zero.
    pub fn random(in_dim: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let mut normal = || -> f64 { rng.sample(rand_distr::StandardNormal) };
        let s1 = 1.0 / (in_dim as f64).sqrt();
        let s2 = 1.0 / (hidden as f64).sqrt();
        TwoHeadModel {
            w1: (0..hidden)
                .map(|_| (0..in_dim).map(|_| s1 * normal()).collect())
                .collect(),
            b1: vec![0.0; hidden],
            cls_w: (0..hidden).map(|_| s2 * normal()).collect(),
            cls_b: 0.0,
            aux_w: (0..hidden).map(|_| s2 * normal()).collect(),
            aux_b: 0.0,
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.b1.len()
    }

    /// (classifier score, adversary score) at a point.
    pub fn scores(&self, x: &[f64]) -> (f64, f64) {
        let c = self.forward(x);
        (c.r1, c.r2)
    }

    fn forward(&self, x: &[f64]) -> PointCache {
        let a: Vec<f64> = self
            .w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| {
                leaky_relu(row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b)
            })
            .collect();
        let r1 = self.cls_w.iter().zip(&a).map(|(w, ai)| w * ai).sum::<f64>() + self.cls_b;
        let r2 = self.aux_w.iter().zip(&a).map(|(w, ai)| w * ai).sum::<f64>() + self.aux_b;
        PointCache { a, r1, r2 }
    }

    /// The classifier as a standalone scorer (shared layer + cls head).
    pub fn cls_hypothesis(&self) -> Hypothesis {
        Hypothesis::Mlp(MlpNet {
            w1: self.w1.clone(),
            b1: self.b1.clone(),
            w2: self.cls_w.clone(),
            b2: self.cls_b,
        })
    }

    /// The adversary as a standalone scorer (shared layer + aux head).
    pub fn aux_hypothesis(&self) -> Hypothesis {
        Hypothesis::Mlp(MlpNet {
            w1: self.w1.clone(),
            b1: self.b1.clone(),
            w2: self.aux_w.clone(),
            b2: self.aux_b,
        })
    }

    fn adversary_step(&mut self, step: f64, g: &AdversaryGrads) {
        for (w, gw) in self.aux_w.iter_mut().zip(&g.w) {
            *w += step * gw;
        }
        self.aux_b += step * g.b;
    }

    fn learner_step(&mut self, step: f64, g: &LearnerGrads) {
        for (row, grow) in self.w1.iter_mut().zip(&g.w1) {
            for (w, gw) in row.iter_mut().zip(grow) {
                *w += step * gw;
            }
        }
        for (b, gb) in self.b1.iter_mut().zip(&g.b1) {
            *b += step * gb;
        }
        for (w, gw) in self.cls_w.iter_mut().zip(&g.cls_w) {
            *w += step * gw;
        }
        self.cls_b += step * g.cls_b;
    }

    fn is_finite(&self) -> bool {
        self.w1.iter().flatten().all(|v| v.is_finite())
            && self.b1.iter().all(|v| v.is_finite())
            && self.cls_w.iter().all(|v| v.is_finite())
            && self.cls_b.is_finite()
            && self.aux_w.iter().all(|v| v.is_finite())
            && self.aux_b.is_finite()
    }
}

/// Gradient of the adversary objective in the aux head's parameters.
#[derive(Debug, Clone)]
pub struct AdversaryGrads {
    pub w: Vec<f64>,
    pub b: f64,
}

/// Gradient of the learner objective in representation + classifier.
#[derive(Debug, Clone)]
pub struct LearnerGrads {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub cls_w: Vec<f64>,
    pub cls_b: f64,
}

/// Full-batch training data: labeled source, unlabeled target features.
/// Construction never touches target labels, so blinded pairs work.
#[derive(Debug, Clone)]
pub struct TrainBatch {
    pub src_points: Vec<Vec<f64>>,
    pub src_raws: Vec<f64>,
    pub tgt_points: Vec<Vec<f64>>,
}

impl TrainBatch {
    pub fn from_pair(pair: &DomainPair) -> Result<Self> {
        let src_points = sampled_points(pair.source().density(), "source")?.to_vec();
        let src_raws = truth_raws(pair.source(), &src_points)?;
        let tgt_points = sampled_points(pair.target_density(), "target")?.to_vec();
        if src_points.is_empty() || tgt_points.is_empty() {
            return Err(Error::InvalidInput("both domains need at least one sample".into()));
        }
        if src_points.len() > MAX_BATCH || tgt_points.len() > MAX_BATCH {
            return Err(Error::InvalidInput(format!(
                "full-batch training caps at {MAX_BATCH} points per domain"
            )));
        }
        let dim = src_points[0].len();
        if tgt_points.iter().any(|p| p.len() != dim)
            || src_points.iter().any(|p| p.len() != dim)
        {
            return Err(Error::InvalidInput(
                "source and target features must share one dimension".into(),
            ));
        }
        Ok(TrainBatch {
            src_points,
            src_raws,
            tgt_points,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.src_points[0].len()
    }
}

fn sampled_points<'a>(density: &'a Density, which: &str) -> Result<&'a [Vec<f64>]> {
    match density {
        Density::Sample { points } => Ok(points),
        _ => Err(Error::InvalidInput(format!(
            "training needs a sampled {which} domain"
        ))),
    }
}

fn truth_raws(domain: &Domain, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    match domain.truth() {
        Truth::PerPoint(raws) => Ok(raws.clone()),
        Truth::Hyp(h) => points.iter().map(|x| h.raw_score(x)).collect(),
    }
}

/// Disagreement losses ℓ̂(h, h′) on both batches at the current params.
fn batch_losses(
    model: &TwoHeadModel,
    batch: &TrainBatch,
    surrogate: LossKind,
) -> (Vec<f64>, Vec<f64>) {
    let of = |points: &[Vec<f64>]| -> Vec<f64> {
        points
            .iter()
            .map(|x| {
                let c = model.forward(x);
                surrogate.eval(c.r1, c.r2)
            })
            .collect()
    };
    (of(&batch.tgt_points), of(&batch.src_points))
}

/// Derivative of the plain conjugate φ*, for the absolute variants.
fn phi_star_deriv(phi: &PhiSpec, y: f64) -> f64 {
    match phi.kind() {
        // φ*(y) = e^y − 1
        PhiKind::Kl => y.exp(),
        // φ*(y) = y²/4 + y
        PhiKind::Chi2 => y / 2.0 + 1.0,
        _ => unreachable!("absolute variants are kl or chi2 only"),
    }
}

/// The two directions' maximizing scales for the composite objective,
/// each found by its own bounded one-dimensional search.
fn jeffreys_component_scales(w: &WitnessValues) -> Result<(f64, f64)> {
    let fwd = scaled_objective_clamped(w, &PhiSpec::kl(), Some(-SCALE_CLAMP), Some(SCALE_CLAMP))?;
    let rev = scaled_objective_clamped(
        w,
        &PhiSpec::reverse_kl(),
        Some(-SCALE_CLAMP),
        Some(SCALE_CLAMP),
    )?;
    Ok((
        fwd.t_star.expect("scaled objectives report their scale"),
        rev.t_star.expect("scaled objectives report their scale"),
    ))
}

/// Per-point ∂objective/∂ℓ coefficients for the configured variant.
fn point_coeffs(
    disc: Discrepancy,
    phi: &PhiSpec,
    t: f64,
    losses_tgt: &[f64],
    losses_src: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if disc.is_abs() {
        let w = WitnessValues::from_uniform(losses_tgt.to_vec(), losses_src.to_vec())?;
        let plain = lt_objective(&w, phi)?;
        let sign = if plain >= 0.0 { 1.0 } else { -1.0 };
        let m = losses_tgt.len() as f64;
        let n = losses_src.len() as f64;
        Ok((
            vec![sign / m; losses_tgt.len()],
            losses_src
                .iter()
                .map(|l| -sign * phi_star_deriv(phi, *l) / n)
                .collect(),
        ))
    } else if let PhiKind::Jeffreys {
        gamma_fwd,
        gamma_rev,
    } = phi.kind()
    {
        // Envelope gradient of the composite: differentiate each direction
        // at its own maximizing scale, then mix with the weights.
        let w = WitnessValues::from_uniform(losses_tgt.to_vec(), losses_src.to_vec())?;
        let (t_fwd, t_rev) = jeffreys_component_scales(&w)?;
        let (ft, fs) = objective_point_coeffs(&PhiSpec::kl(), t_fwd, losses_tgt, losses_src);
        let (rt, rs) =
            objective_point_coeffs(&PhiSpec::reverse_kl(), t_rev, losses_tgt, losses_src);
        Ok((
            ft.iter()
                .zip(&rt)
                .map(|(a, b)| gamma_fwd * a + gamma_rev * b)
                .collect(),
            fs.iter()
                .zip(&rs)
                .map(|(a, b)| gamma_fwd * a + gamma_rev * b)
                .collect(),
        ))
    } else {
        Ok(objective_point_coeffs(phi, t, losses_tgt, losses_src))
    }
}

/// What the inner player maximizes: the shifted discrepancy at scale t,
/// or |plain-conjugate discrepancy| for the absolute variants. The
/// composite variant ignores `t` and scales each direction at its own
/// maximizer — with a shared non-negative witness at one common scale,
/// the two directions cancel to zero by convexity, leaving no signal.
pub fn adversary_objective(
    model: &TwoHeadModel,
    batch: &TrainBatch,
    disc: Discrepancy,
    surrogate: LossKind,
    t: f64,
) -> Result<f64> {
    let phi = disc.kernel()?;
    let (losses_tgt, losses_src) = batch_losses(model, batch, surrogate);
    let w = WitnessValues::from_uniform(losses_tgt, losses_src)?;
    if disc.is_abs() {
        return Ok(lt_objective(&w, &phi)?.abs());
    }
    if let PhiKind::Jeffreys {
        gamma_fwd,
        gamma_rev,
    } = phi.kind()
    {
        let fwd =
            scaled_objective_clamped(&w, &PhiSpec::kl(), Some(-SCALE_CLAMP), Some(SCALE_CLAMP))?;
        let rev = scaled_objective_clamped(
            &w,
            &PhiSpec::reverse_kl(),
            Some(-SCALE_CLAMP),
            Some(SCALE_CLAMP),
        )?;
        return Ok(gamma_fwd * fwd.value + gamma_rev * rev.value);
    }
    objective_at_t(&w, &phi, t)
}

/// ∂(adversary objective)/∂(aux head), at frozen representation and
/// classifier. Both batches contribute — every loss reads the aux score.
pub fn adversary_gradient(
    model: &TwoHeadModel,
    batch: &TrainBatch,
    disc: Discrepancy,
    surrogate: LossKind,
    t: f64,
) -> Result<AdversaryGrads> {
    let phi = disc.kernel()?;
    let (losses_tgt, losses_src) = batch_losses(model, batch, surrogate);
    let (c_tgt, c_src) = point_coeffs(disc, &phi, t, &losses_tgt, &losses_src)?;
    let mut g = AdversaryGrads {
        w: vec![0.0; model.hidden_dim()],
        b: 0.0,
    };
    let mut side = |points: &[Vec<f64>], coeffs: &[f64]| {
        for (x, c) in points.iter().zip(coeffs) {
            let cache = model.forward(x);
            let (_, dl2) = surrogate
                .grad(cache.r1, cache.r2)
                .expect("validated differentiable surrogate");
            let up = c * dl2;
            for (gw, ai) in g.w.iter_mut().zip(&cache.a) {
                *gw += up * ai;
            }
            g.b += up;
        }
    };
    side(&batch.tgt_points, &c_tgt);
    side(&batch.src_points, &c_src);
    Ok(g)
}

/// Average surrogate loss of the classifier against the source labels.
pub fn source_surrogate_risk(model: &TwoHeadModel, batch: &TrainBatch, surrogate: LossKind) -> f64 {
    let total: f64 = batch
        .src_points
        .iter()
        .zip(&batch.src_raws)
        .map(|(x, y)| surrogate.eval(model.forward(x).r1, *y))
        .sum();
    total / batch.src_points.len() as f64
}

/// What the outer player minimizes: R̂_source(h) + η·(discrepancy term).
pub fn learner_objective(
    model: &TwoHeadModel,
    batch: &TrainBatch,
    disc: Discrepancy,
    surrogate: LossKind,
    t: f64,
    eta: f64,
) -> Result<f64> {
    Ok(source_surrogate_risk(model, batch, surrogate)
        + eta * adversary_objective(model, batch, disc, surrogate, t)?)
}

/// ∂(learner objective)/∂(representation, classifier head), at a frozen
/// aux head. The discrepancy part back-propagates through both scores:
/// the classifier's directly, the adversary's via the shared layer.
pub fn learner_gradient(
    model: &TwoHeadModel,
    batch: &TrainBatch,
    disc: Discrepancy,
    surrogate: LossKind,
    t: f64,
    eta: f64,
) -> Result<LearnerGrads> {
    let phi = disc.kernel()?;
    let (losses_tgt, losses_src) = batch_losses(model, batch, surrogate);
    let (c_tgt, c_src) = point_coeffs(disc, &phi, t, &losses_tgt, &losses_src)?;
    let hidden = model.hidden_dim();
    let in_dim = batch.in_dim();
    let mut g = LearnerGrads {
        w1: vec![vec![0.0; in_dim]; hidden],
        b1: vec![0.0; hidden],
        cls_w: vec![0.0; hidden],
        cls_b: 0.0,
    };
    let n = batch.src_points.len() as f64;
    // One point's contribution: upstream scalars on the two scores.
    let mut accumulate = |x: &[f64], cache: &PointCache, up_cls: f64, up_aux: f64| {
        for (gw, ai) in g.cls_w.iter_mut().zip(&cache.a) {
            *gw += up_cls * ai;
        }
        g.cls_b += up_cls;
        for j in 0..hidden {
            // a and the pre-activation share a sign, so the leaky slope
            // can be read off the activation directly.
            let dz = (up_cls * model.cls_w[j] + up_aux * model.aux_w[j])
                * leaky_relu_deriv(cache.a[j]);
            g.b1[j] += dz;
            for (gw, xi) in g.w1[j].iter_mut().zip(x) {
                *gw += dz * xi;
            }
        }
    };
    for ((x, y), c) in batch.src_points.iter().zip(&batch.src_raws).zip(&c_src) {
        let cache = model.forward(x);
        let (d_risk, _) = surrogate
            .grad(cache.r1, *y)
            .expect("validated differentiable surrogate");
        let (dl1, dl2) = surrogate
            .grad(cache.r1, cache.r2)
            .expect("validated differentiable surrogate");
        accumulate(x, &cache, d_risk / n + eta * c * dl1, eta * c * dl2);
    }
    for (x, c) in batch.tgt_points.iter().zip(&c_tgt) {
        let cache = model.forward(x);
        let (dl1, dl2) = surrogate
            .grad(cache.r1, cache.r2)
            .expect("validated differentiable surrogate");
        accumulate(x, &cache, eta * c * dl1, eta * c * dl2);
    }
    Ok(g)
}

/// Quadratic-approximation (KL) or closed-form (χ²) scale refresh, pulled
/// back into the trust region of its formula.
fn refreshed_scale(phi: &PhiSpec, losses_tgt: &[f64], losses_src: &[f64]) -> Result<f64> {
    match phi.kind() {
        PhiKind::Kl => {
            let wt = vec![1.0 / losses_tgt.len() as f64; losses_tgt.len()];
            let ws = vec![1.0 / losses_src.len() as f64; losses_src.len()];
            let t = optimal_t_kl_approx((losses_tgt, &wt), (losses_src, &ws))?;
            Ok(t.clamp(REFRESH_TRUST_KL.0, REFRESH_TRUST_KL.1))
        }
        PhiKind::Chi2 => {
            let w = WitnessValues::from_uniform(losses_tgt.to_vec(), losses_src.to_vec())?;
            let t = optimal_t_chi2(w.mean_p(), w.mean_q(), w.var_q())?;
            Ok(t.clamp(REFRESH_TRUST_CHI2.0, REFRESH_TRUST_CHI2.1))
        }
        _ => Err(Error::InvalidInput(
            "optimized scale is implemented for kl and chi2 only".into(),
        )),
    }
}

/// One full training run's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct TrainState {
    pub model: TwoHeadModel,
    pub steps_run: usize,
    /// (step, discrepancy estimate) per outer step.
    pub divergence_trajectory: Vec<(usize, f64)>,
    /// (step, source surrogate risk) per outer step.
    pub risk_trajectory: Vec<(usize, f64)>,
    /// (step, scale used) per outer step; the composite variant logs 1.
    pub t_trajectory: Vec<(usize, f64)>,
    pub exploded: bool,
    /// Degenerate-variance batches where the scale refresh fell back to 1.
    pub t_fallbacks: usize,
    /// Per-step classifier snapshots for post-hoc metrics.
    #[serde(skip)]
    pub snapshots: Vec<Hypothesis>,
}

impl TrainState {
    pub fn final_hypothesis(&self) -> Hypothesis {
        self.model.cls_hypothesis()
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.divergence_trajectory
            .iter()
            .map(|(_, d)| d.abs())
            .fold(0.0, f64::max)
    }

    pub fn source_accuracy(&self, pair: &DomainPair) -> Result<f64> {
        accuracy(&self.final_hypothesis(), pair.source())
    }

    /// Needs target labels — errors on blinded pairs, by design.
    pub fn target_accuracy(&self, pair: &DomainPair) -> Result<f64> {
        pair.target_accuracy(&self.final_hypothesis())
    }

    /// Post-hoc per-step target accuracy from the classifier snapshots.
    pub fn accuracy_trajectory(&self, pair: &DomainPair) -> Result<Vec<(usize, f64)>> {
        self.divergence_trajectory
            .iter()
            .zip(&self.snapshots)
            .map(|((step, _), h)| Ok((*step, pair.target_accuracy(h)?)))
            .collect()
    }
}

/// Alternating min-max training. Deterministic given the seed; halts with
/// the explosion flag when |d| leaves [−1e6, 1e6] or parameters go
/// non-finite (expected behaviour for the absolute variants).
pub fn train(config: &TrainConfig, pair: &DomainPair) -> Result<TrainState> {
    train_impl(config, pair, true)
}

/// Source-only ablation baseline: the same learner loop with the
/// discrepancy term dropped (the η → 0 limit) and the adversary frozen.
/// The discrepancy trajectory still logs what the untrained adversary
/// sees, so runs stay comparable step by step.
pub fn train_source_only(config: &TrainConfig, pair: &DomainPair) -> Result<TrainState> {
    train_impl(config, pair, false)
}

fn train_impl(config: &TrainConfig, pair: &DomainPair, adversarial: bool) -> Result<TrainState> {
    config.validate()?;
    let batch = TrainBatch::from_pair(pair)?;
    let phi = config.discrepancy.kernel()?;
    let refresh = adversarial && config.scale_refresh();
    let eta = if adversarial { config.eta } else { 0.0 };
    let inner_steps = if adversarial { config.inner_steps } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = TwoHeadModel::random(batch.in_dim(), config.hidden, &mut rng);

    let mut divergence_trajectory = Vec::with_capacity(config.outer_steps);
    let mut risk_trajectory = Vec::with_capacity(config.outer_steps);
    let mut t_trajectory = Vec::with_capacity(config.outer_steps);
    let mut snapshots = Vec::with_capacity(config.outer_steps);
    let mut exploded = false;
    let mut t_fallbacks = 0;
    let mut steps_run = 0;

    // Config and batch are validated up front, so a runtime error from the
    // objective pipeline means scores have overflowed — the explosion case,
    // not a caller mistake. Those paths halt with the flag set.
    for step in 0..config.outer_steps {
        // Scale for the whole step, from the batch as the adversary sees it.
        let t = if refresh {
            let (losses_tgt, losses_src) = batch_losses(&model, &batch, config.surrogate);
            match refreshed_scale(&phi, &losses_tgt, &losses_src) {
                Ok(t) => t,
                Err(Error::DegenerateVariance { .. }) => {
                    t_fallbacks += 1;
                    1.0
                }
                Err(e) => return Err(e),
            }
        } else {
            1.0
        };

        let mut blew_up = false;
        for _ in 0..inner_steps {
            match adversary_gradient(&model, &batch, config.discrepancy, config.surrogate, t) {
                Ok(g) => model.adversary_step(config.inner_lr, &g),
                Err(_) => {
                    blew_up = true;
                    break;
                }
            }
            if !model.is_finite() {
                blew_up = true;
                break;
            }
        }

        let d = if blew_up {
            f64::INFINITY
        } else {
            match adversary_objective(&model, &batch, config.discrepancy, config.surrogate, t) {
                Ok(d) => d,
                Err(_) => {
                    blew_up = true;
                    f64::INFINITY
                }
            }
        };
        divergence_trajectory.push((step, d));
        risk_trajectory.push((
            step,
            source_surrogate_risk(&model, &batch, config.surrogate),
        ));
        t_trajectory.push((step, t));
        snapshots.push(model.cls_hypothesis());
        steps_run = step + 1;
        if blew_up || !d.is_finite() || d.abs() > EXPLOSION_LIMIT {
            exploded = true;
            break;
        }

        match learner_gradient(
            &model,
            &batch,
            config.discrepancy,
            config.surrogate,
            t,
            eta,
        ) {
            Ok(g) => model.learner_step(-config.outer_lr, &g),
            Err(_) => {
                exploded = true;
                break;
            }
        }
        if !model.is_finite() {
            exploded = true;
            break;
        }
    }

    Ok(TrainState {
        model,
        steps_run,
        divergence_trajectory,
        risk_trajectory,
        t_trajectory,
        exploded,
        t_fallbacks,
        snapshots,
    })
}

/// Compares the two inner maximization targets on an enumerable witness
/// class over discrete domains: the plain-conjugate objective and the
/// shifted objective, against the exact divergence of the two empirical
/// measures. With witnesses rich enough to hit the dual optimum both
/// maxima meet the exact value; restricted witnesses keep the shifted
/// maximum ≥ the plain one, and both stay below the exact divergence.
///
/// Witness values are the signed score gaps h′ − h per atom: the equality
/// premise needs sign-free witnesses, which no non-negative loss family
/// can provide.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub max_plain: f64,
    pub max_shifted: f64,
    pub exact: f64,
    pub gap: f64,
    pub within_tol: bool,
    pub argmax_plain: usize,
    pub argmax_shifted: usize,
}

pub fn objective_equivalence_check(
    h: &Hypothesis,
    class: &HypothesisClass,
    pair: &DomainPair,
    phi: &PhiSpec,
    tol: f64,
) -> Result<EquivalenceReport> {
    let members = class.members().ok_or_else(|| {
        Error::InvalidInput("the equivalence check needs an enumerable class".into())
    })?;
    if members.is_empty() {
        return Err(Error::InvalidInput("empty hypothesis class".into()));
    }
    let probs_mu = match pair.source().density() {
        Density::Discrete { probs } => probs,
        _ => {
            return Err(Error::InvalidInput(
                "the equivalence check needs discrete domains with shared support".into(),
            ))
        }
    };
    let probs_nu = match pair.target_density() {
        Density::Discrete { probs } => probs,
        _ => {
            return Err(Error::InvalidInput(
                "the equivalence check needs discrete domains with shared support".into(),
            ))
        }
    };
    if probs_mu.len() != probs_nu.len() {
        return Err(Error::InvalidInput(
            "source and target must share one atom set".into(),
        ));
    }
    let n_atoms = probs_mu.len();
    let atoms: Vec<String> = (0..n_atoms).map(|i| i.to_string()).collect();
    let exact = exact_f_divergence(
        &DiscreteDistribution::new(atoms.clone(), probs_nu.clone())?,
        &DiscreteDistribution::new(atoms, probs_mu.clone())?,
        phi,
    )?;

    let mut best_plain: Option<(f64, usize)> = None;
    let mut best_shifted: Option<(f64, usize)> = None;
    for (idx, h2) in members.iter().enumerate() {
        let gaps: Vec<f64> = (0..n_atoms)
            .map(|i| Ok(h2.raw_at_atom(i, n_atoms)? - h.raw_at_atom(i, n_atoms)?))
            .collect::<Result<_>>()?;
        let w = WitnessValues::new(
            gaps.clone(),
            probs_nu.clone(),
            gaps,
            probs_mu.clone(),
        )?;
        let plain = lt_objective(&w, phi)?;
        let shifted = shifted_objective(&w, phi)?.value;
        if best_plain.map_or(true, |(v, _)| plain > v) {
            best_plain = Some((plain, idx));
        }
        if best_shifted.map_or(true, |(v, _)| shifted > v) {
            best_shifted = Some((shifted, idx));
        }
    }
    let (max_plain, argmax_plain) = best_plain.expect("nonempty class");
    let (max_shifted, argmax_shifted) = best_shifted.expect("nonempty class");
    let gap = (max_plain - max_shifted).abs();
    Ok(EquivalenceReport {
        max_plain,
        max_shifted,
        exact,
        gap,
        within_tol: gap <= tol,
        argmax_plain,
        argmax_shifted,
    })
}
