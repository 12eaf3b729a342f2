//! Hypotheses, disagreement losses, risks, and induced loss classes.
//!
//! Every hypothesis maps an input to a raw score in ℝ; the soft prediction
//! is σ(raw) ∈ [0, 1] and the hard label is raw ≥ 0. Four representations:
//!
//! - `Threshold { c }` — 1-D step hypothesis: label 1 iff x ≥ c. Raw scores
//!   are ±40, which saturate σ to exactly 1/0 in f64, so the bounded
//!   sigmoid-disagreement loss coincides with zero-one loss on them.
//! - `Table { scores }` — an explicit soft score per atom of a finite
//!   domain (used by the discrete random instances).
//! - `Linear { w, b }` — raw = w·x + b.
//! - `Mlp` — one hidden layer with leaky-ReLU (slope 0.01) activations and
//!   hand-written parameter gradients; no autodiff anywhere.
//!
//! Losses compare raw scores:
//!
//! - `zero_one`: 1 iff the hard labels differ,
//! - `bounded_sigmoid`: |σ(r) − σ(r′)| ∈ [0, 1],
//! - `surrogate`: (σ(r) − σ(r′))·(r − r′), the symmetrised Bernoulli-KL
//!   cross-entropy between the two soft predictions — smooth, zero iff
//!   r = r′, and *unbounded*, which is exactly what the runaway-objective
//!   reproductions need.
//!
//! Risks and pairwise disagreements integrate over a domain density, with a
//! closed-form path for threshold hypotheses on uniform intervals and
//! weighted sums elsewhere; each returns the per-atom/per-point loss
//! profile so discrepancy code can reuse it as witness values.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datasets::{Density, Domain, Truth};
use crate::error::{Error, Result};

/// Leaky-ReLU negative-side slope.
pub const LEAKY_SLOPE: f64 = 0.01;

/// Raw score magnitude used for hard (step/table) hypotheses: σ(±40)
/// rounds to exactly 1.0 / 0.0 in f64.
pub const HARD_SCORE: f64 = 40.0;

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// σ′(x) = σ(x)·(1 − σ(x)).
pub fn sigmoid_deriv(x: f64) -> f64 {
    let s = sigmoid(x);
    s * (1.0 - s)
}

/// Inverse of [`sigmoid`], clamped to raw scores in [−40, 40].
pub fn logit(p: f64) -> f64 {
    let p = p.clamp(sigmoid(-HARD_SCORE), sigmoid(HARD_SCORE));
    (p / (1.0 - p)).ln().clamp(-HARD_SCORE, HARD_SCORE)
}

pub fn leaky_relu(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

pub fn leaky_relu_deriv(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// One-hidden-layer scorer: raw(x) = w2·leakyrelu(W1·x + b1) + b2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    /// hidden × input weight matrix.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Parameter-shaped gradient of some scalar objective.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpNet {
    /// Gaussian init scaled by 1/√fan_in, from the caller's seeded RNG.
    pub fn random(in_dim: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let mut normal = || -> f64 { rng.sample(rand_distr::StandardNormal) };
        let s1 = 1.0 / (in_dim as f64).sqrt();
        let s2 = 1.0 / (hidden as f64).sqrt();
        MlpNet {
            w1: (0..hidden)
                .map(|_| (0..in_dim).map(|_| s1 * normal()).collect())
                .collect(),
            b1: vec![0.0; hidden],
            w2: (0..hidden).map(|_| s2 * normal()).collect(),
            b2: 0.0,
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.b1.len()
    }

    /// Pre-activations W1·x + b1.
    pub fn pre_activations(&self, x: &[f64]) -> Vec<f64> {
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b)
            .collect()
    }

    pub fn raw(&self, x: &[f64]) -> f64 {
        let pre = self.pre_activations(x);
        self.w2
            .iter()
            .zip(&pre)
            .map(|(w, u)| w * leaky_relu(*u))
            .sum::<f64>()
            + self.b2
    }

    pub fn zero_grads(&self) -> MlpGrads {
        MlpGrads {
            w1: self.w1.iter().map(|r| vec![0.0; r.len()]).collect(),
            b1: vec![0.0; self.b1.len()],
            w2: vec![0.0; self.w2.len()],
            b2: 0.0,
        }
    }

    /// Accumulate ∂(upstream·raw(x))/∂params into `grads`.
    pub fn accumulate_grads(&self, x: &[f64], upstream: f64, grads: &mut MlpGrads) {
        let pre = self.pre_activations(x);
        for (j, u) in pre.iter().enumerate() {
            grads.w2[j] += upstream * leaky_relu(*u);
            let gz = upstream * self.w2[j] * leaky_relu_deriv(*u);
            grads.b1[j] += gz;
            for (k, xi) in x.iter().enumerate() {
                grads.w1[j][k] += gz * xi;
            }
        }
        grads.b2 += upstream;
    }

    /// In-place params += step · grads.
    pub fn step(&mut self, step: f64, grads: &MlpGrads) {
        for (row, grow) in self.w1.iter_mut().zip(&grads.w1) {
            for (w, g) in row.iter_mut().zip(grow) {
                *w += step * g;
            }
        }
        for (b, g) in self.b1.iter_mut().zip(&grads.b1) {
            *b += step * g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grads.w2) {
            *w += step * g;
        }
        self.b2 += step * grads.b2;
    }

    pub fn params_finite(&self) -> bool {
        self.w1.iter().flatten().all(|v| v.is_finite())
            && self.b1.iter().all(|v| v.is_finite())
            && self.w2.iter().all(|v| v.is_finite())
            && self.b2.is_finite()
    }
}

/// A single binary hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// 1-D step: label 1 iff x ≥ c.
    Threshold { c: f64 },
    /// Soft score per atom of a finite domain.
    Table { scores: Vec<f64> },
    /// raw = w·x + b.
    Linear { w: Vec<f64>, b: f64 },
    /// One-hidden-layer scorer.
    Mlp(MlpNet),
}

impl Hypothesis {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Hypothesis::Threshold { .. } => "threshold",
            Hypothesis::Table { .. } => "table",
            Hypothesis::Linear { .. } => "linear",
            Hypothesis::Mlp(_) => "mlp",
        }
    }

    /// Raw score on a real-valued input. Tables have no pointwise form and
    /// must be evaluated per atom instead.
    pub fn raw_score(&self, x: &[f64]) -> Result<f64> {
        match self {
            Hypothesis::Threshold { c } => {
                let x0 = *x.first().ok_or_else(|| {
                    Error::InvalidInput("threshold hypothesis needs a 1-D input".into())
                })?;
                Ok(if x0 >= *c { HARD_SCORE } else { -HARD_SCORE })
            }
            Hypothesis::Table { .. } => Err(Error::Incompatible {
                hypothesis: "table".into(),
                domain: "pointwise".into(),
            }),
            Hypothesis::Linear { w, b } => {
                if w.len() != x.len() {
                    return Err(Error::InvalidInput(format!(
                        "linear hypothesis expects {} features, got {}",
                        w.len(),
                        x.len()
                    )));
                }
                Ok(w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b)
            }
            Hypothesis::Mlp(net) => Ok(net.raw(x)),
        }
    }

    /// Raw score at atom `i` of a finite domain with `n_atoms` atoms.
    pub fn raw_at_atom(&self, i: usize, n_atoms: usize) -> Result<f64> {
        match self {
            Hypothesis::Table { scores } => {
                if scores.len() != n_atoms {
                    return Err(Error::InvalidInput(format!(
                        "table covers {} atoms, domain has {n_atoms}",
                        scores.len()
                    )));
                }
                Ok(logit(scores[i]))
            }
            other => Err(Error::Incompatible {
                hypothesis: other.kind_name().into(),
                domain: "discrete-atom".into(),
            }),
        }
    }

    /// Soft prediction σ(raw) ∈ [0, 1].
    pub fn prob(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.raw_score(x)?))
    }

    /// Hard label raw ≥ 0.
    pub fn label(&self, x: &[f64]) -> Result<bool> {
        Ok(self.raw_score(x)? >= 0.0)
    }
}

/// Disagreement losses on pairs of raw scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// 1 iff hard labels differ. Satisfies the triangle inequality.
    ZeroOne,
    /// |σ(r) − σ(r′)| ∈ [0, 1]. Satisfies the triangle inequality.
    BoundedSigmoid,
    /// (σ(r) − σ(r′))·(r − r′): smooth, non-negative, unbounded.
    Surrogate,
}

impl LossKind {
    pub fn eval(&self, r1: f64, r2: f64) -> f64 {
        match self {
            LossKind::ZeroOne => {
                if (r1 >= 0.0) != (r2 >= 0.0) {
                    1.0
                } else {
                    0.0
                }
            }
            LossKind::BoundedSigmoid => (sigmoid(r1) - sigmoid(r2)).abs(),
            LossKind::Surrogate => (sigmoid(r1) - sigmoid(r2)) * (r1 - r2),
        }
    }

    /// (∂ℓ/∂r1, ∂ℓ/∂r2); `None` for the non-differentiable zero-one loss.
    pub fn grad(&self, r1: f64, r2: f64) -> Option<(f64, f64)> {
        match self {
            LossKind::ZeroOne => None,
            LossKind::BoundedSigmoid => {
                let s = sigmoid(r1) - sigmoid(r2);
                let sign = if s >= 0.0 { 1.0 } else { -1.0 };
                Some((sign * sigmoid_deriv(r1), -sign * sigmoid_deriv(r2)))
            }
            LossKind::Surrogate => {
                let ds = sigmoid(r1) - sigmoid(r2);
                let dr = r1 - r2;
                Some((
                    sigmoid_deriv(r1) * dr + ds,
                    -sigmoid_deriv(r2) * dr - ds,
                ))
            }
        }
    }

    /// Upper bound of the loss range, when one exists.
    pub fn upper_bound(&self) -> Option<f64> {
        match self {
            LossKind::ZeroOne | LossKind::BoundedSigmoid => Some(1.0),
            LossKind::Surrogate => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossKind::ZeroOne => "zero_one",
            LossKind::BoundedSigmoid => "bounded_sigmoid",
            LossKind::Surrogate => "surrogate",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero_one" => Ok(LossKind::ZeroOne),
            "bounded_sigmoid" => Ok(LossKind::BoundedSigmoid),
            "surrogate" => Ok(LossKind::Surrogate),
            _ => Err(Error::InvalidInput(format!("unknown loss `{s}`"))),
        }
    }
}

/// Loss values with the probability mass carried by each value.
#[derive(Debug, Clone, PartialEq)]
pub struct LossProfile {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LossProfile {
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * (v - m) * (v - m))
            .sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(v, _)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Distribution of ℓ(h, h′) under a domain density.
///
/// Threshold pairs on a uniform interval integrate in closed form (the
/// disagreement region is an interval, so the profile has two atoms);
/// tables integrate against the atom masses; samples average pointwise.
pub fn disagreement(
    h: &Hypothesis,
    h2: &Hypothesis,
    density: &Density,
    loss: LossKind,
) -> Result<LossProfile> {
    match density {
        Density::UniformInterval { lo, hi } => {
            let (c1, c2) = match (h, h2) {
                (Hypothesis::Threshold { c: c1 }, Hypothesis::Threshold { c: c2 }) => (*c1, *c2),
                _ => {
                    return Err(Error::Incompatible {
                        hypothesis: format!("{}/{}", h.kind_name(), h2.kind_name()),
                        domain: "analytic uniform-interval".into(),
                    })
                }
            };
            let (a, b) = (c1.min(c2), c1.max(c2));
            let overlap = (b.min(*hi) - a.max(*lo)).max(0.0);
            let mass = overlap / (hi - lo);
            let v = loss.eval(HARD_SCORE, -HARD_SCORE);
            Ok(LossProfile {
                values: vec![v, 0.0],
                weights: vec![mass, 1.0 - mass],
            })
        }
        Density::Discrete { probs } => {
            let n = probs.len();
            let values = (0..n)
                .map(|i| Ok(loss.eval(h.raw_at_atom(i, n)?, h2.raw_at_atom(i, n)?)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(LossProfile {
                values,
                weights: probs.clone(),
            })
        }
        Density::Sample { points } => {
            let values = points
                .iter()
                .map(|x| Ok(loss.eval(h.raw_score(x)?, h2.raw_score(x)?)))
                .collect::<Result<Vec<f64>>>()?;
            let w = 1.0 / points.len() as f64;
            Ok(LossProfile {
                weights: vec![w; values.len()],
                values,
            })
        }
    }
}

/// Expected loss of `h` against the domain's ground-truth labelling.
pub fn risk(h: &Hypothesis, domain: &Domain, loss: LossKind) -> Result<f64> {
    match domain.truth() {
        Truth::Hyp(t) => Ok(disagreement(h, t, domain.density(), loss)?.mean()),
        Truth::PerPoint(raws) => match domain.density() {
            Density::Sample { points } => {
                if raws.len() != points.len() {
                    return Err(Error::InvalidInput(format!(
                        "{} labels for {} points",
                        raws.len(),
                        points.len()
                    )));
                }
                let mut total = 0.0;
                for (x, r) in points.iter().zip(raws) {
                    total += loss.eval(h.raw_score(x)?, *r);
                }
                Ok(total / points.len() as f64)
            }
            _ => Err(Error::InvalidInput(
                "per-point labels require a sampled density".into(),
            )),
        },
    }
}

/// Fraction of the domain where `h`'s hard label matches the truth.
pub fn accuracy(h: &Hypothesis, domain: &Domain) -> Result<f64> {
    Ok(1.0 - risk(h, domain, LossKind::ZeroOne)?)
}

/// A hypothesis class: an explicit member list or a parametric sampler.
#[derive(Debug, Clone)]
pub enum ClassFamily {
    Enumerated(Vec<Hypothesis>),
    /// Linear scorers with w, b drawn from N(0, scale²).
    LinearDraws { dim: usize, scale: f64 },
    /// One-hidden-layer scorers at random initialisation.
    MlpDraws { in_dim: usize, hidden: usize },
}

#[derive(Debug, Clone)]
pub struct HypothesisClass {
    pub family: ClassFamily,
    pub loss: LossKind,
}

impl HypothesisClass {
    pub fn enumerated(members: Vec<Hypothesis>, loss: LossKind) -> Self {
        Self {
            family: ClassFamily::Enumerated(members),
            loss,
        }
    }

    /// `n` equispaced thresholds on [lo, hi], endpoints included.
    pub fn threshold_grid(lo: f64, hi: f64, n: usize, loss: LossKind) -> Self {
        let members = (0..n)
            .map(|i| Hypothesis::Threshold {
                c: lo + (hi - lo) * i as f64 / (n - 1) as f64,
            })
            .collect();
        Self::enumerated(members, loss)
    }

    pub fn members(&self) -> Option<&[Hypothesis]> {
        match &self.family {
            ClassFamily::Enumerated(m) => Some(m),
            _ => None,
        }
    }

    pub fn len(&self) -> Option<usize> {
        self.members().map(|m| m.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Draw one member; enumerated families pick uniformly at random.
    pub fn sample_member(&self, rng: &mut impl Rng) -> Hypothesis {
        match &self.family {
            ClassFamily::Enumerated(m) => m[rng.gen_range(0..m.len())].clone(),
            ClassFamily::LinearDraws { dim, scale } => {
                let mut normal = || -> f64 { rng.sample(rand_distr::StandardNormal) };
                Hypothesis::Linear {
                    w: (0..*dim).map(|_| scale * normal()).collect(),
                    b: scale * normal(),
                }
            }
            ClassFamily::MlpDraws { in_dim, hidden } => {
                Hypothesis::Mlp(MlpNet::random(*in_dim, *hidden, rng))
            }
        }
    }
}

/// Rows of the induced loss class H^ℓ = {x ↦ ℓ(h(x), h′(x))} evaluated on
/// `points`: one row per ordered member pair for enumerated classes, or
/// `budget` seeded random pairs for parametric families.
pub fn induced_loss_rows(
    class: &HypothesisClass,
    points: &[Vec<f64>],
    budget: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    use rand::SeedableRng;
    let pairs: Vec<(Hypothesis, Hypothesis)> = match class.members() {
        Some(members) => members
            .iter()
            .flat_map(|a| members.iter().map(move |b| (a.clone(), b.clone())))
            .collect(),
        None => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..budget)
                .map(|_| (class.sample_member(&mut rng), class.sample_member(&mut rng)))
                .collect()
        }
    };
    pairs
        .iter()
        .map(|(a, b)| {
            points
                .iter()
                .map(|x| Ok(class.loss.eval(a.raw_score(x)?, b.raw_score(x)?)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{Density, Domain, Truth};

    #[test]
    fn threshold_risk_closed_forms() {
        // Truth at 1/2. On U[0,1]: risk(h_c) = 1/2 − c for c ≤ 1/2.
        // On U[0,2]: half of that, e.g. h_{1/4} → 0.125.
        let truth = Hypothesis::Threshold { c: 0.5 };
        let mu = Domain::new(
            Density::UniformInterval { lo: 0.0, hi: 1.0 },
            Truth::Hyp(truth.clone()),
        );
        let nu = Domain::new(
            Density::UniformInterval { lo: 0.0, hi: 2.0 },
            Truth::Hyp(truth),
        );
        let h = Hypothesis::Threshold { c: 0.25 };
        assert_eq!(risk(&h, &mu, LossKind::ZeroOne).unwrap(), 0.25);
        assert_eq!(risk(&h, &nu, LossKind::ZeroOne).unwrap(), 0.125);
    }

    #[test]
    fn disagreement_profile_is_a_two_atom_distribution() {
        let h = Hypothesis::Threshold { c: 0.5 };
        let h2 = Hypothesis::Threshold { c: 0.1 };
        let p = disagreement(
            &h,
            &h2,
            &Density::UniformInterval { lo: 0.0, hi: 2.0 },
            LossKind::ZeroOne,
        )
        .unwrap();
        assert_eq!(p.values, vec![1.0, 0.0]);
        assert!((p.weights[0] - 0.2).abs() < 1e-15);
        assert!((p.mean() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_one_triangle_inequality_exhaustive() {
        // ℓ(a,b) ≤ ℓ(a,c) + ℓ(c,b) over every hard-label combination.
        let raws = [-HARD_SCORE, HARD_SCORE];
        for a in raws {
            for b in raws {
                for c in raws {
                    let l = LossKind::ZeroOne;
                    assert!(l.eval(a, b) <= l.eval(a, c) + l.eval(c, b) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn bounded_sigmoid_triangle_inequality_on_a_grid() {
        // 21³ raw-score grid on [−5, 5]; |σ(a)−σ(b)| inherits the triangle
        // inequality from |·| and stays within [0, 1].
        let grid: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
        let l = LossKind::BoundedSigmoid;
        for &a in &grid {
            for &b in &grid {
                assert!(l.eval(a, b) <= 1.0);
                for &c in &grid {
                    assert!(l.eval(a, b) <= l.eval(a, c) + l.eval(c, b) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn losses_are_symmetric_and_zero_on_the_diagonal() {
        let grid: Vec<f64> = (0..11).map(|i| -4.0 + 0.8 * i as f64).collect();
        for loss in [LossKind::ZeroOne, LossKind::BoundedSigmoid, LossKind::Surrogate] {
            for &a in &grid {
                assert_eq!(loss.eval(a, a), 0.0, "{}", loss.name());
                for &b in &grid {
                    assert!(
                        (loss.eval(a, b) - loss.eval(b, a)).abs() < 1e-15,
                        "{}",
                        loss.name()
                    );
                    assert!(loss.eval(a, b) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn hard_scores_saturate_the_sigmoid_exactly() {
        assert_eq!(sigmoid(HARD_SCORE), 1.0);
        assert_eq!(
            LossKind::BoundedSigmoid.eval(HARD_SCORE, -HARD_SCORE),
            1.0
        );
    }

    #[test]
    fn loss_gradients_match_finite_differences() {
        let h = 1e-6;
        for loss in [LossKind::BoundedSigmoid, LossKind::Surrogate] {
            for (r1, r2) in [(0.3, -1.2), (2.0, 1.9), (-0.7, 0.4), (1.5, 1.5001)] {
                let (g1, g2) = loss.grad(r1, r2).unwrap();
                let n1 = (loss.eval(r1 + h, r2) - loss.eval(r1 - h, r2)) / (2.0 * h);
                let n2 = (loss.eval(r1, r2 + h) - loss.eval(r1, r2 - h)) / (2.0 * h);
                assert!((g1 - n1).abs() < 1e-6, "{} d1 at ({r1},{r2})", loss.name());
                assert!((g2 - n2).abs() < 1e-6, "{} d2 at ({r1},{r2})", loss.name());
            }
        }
        assert!(LossKind::ZeroOne.grad(1.0, -1.0).is_none());
    }

    #[test]
    fn table_disagreement_on_a_discrete_domain() {
        let h = Hypothesis::Table {
            scores: vec![1.0, 0.0, 1.0],
        };
        let h2 = Hypothesis::Table {
            scores: vec![1.0, 1.0, 0.0],
        };
        let p = disagreement(
            &h,
            &h2,
            &Density::Discrete {
                probs: vec![0.5, 0.3, 0.2],
            },
            LossKind::ZeroOne,
        )
        .unwrap();
        assert_eq!(p.values, vec![0.0, 1.0, 1.0]);
        assert!((p.mean() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mlp_parameter_gradients_match_central_differences() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut net = MlpNet::random(3, 4, &mut rng);
        let x = vec![0.3, -1.1, 0.8];
        let mut grads = net.zero_grads();
        net.accumulate_grads(&x, 1.0, &mut grads);
        let h = 1e-6;
        let check = |got: f64, plus: f64, minus: f64, what: &str| {
            let num = (plus - minus) / (2.0 * h);
            let rel = (got - num).abs() / num.abs().max(1e-8);
            assert!(rel < 1e-4, "{what}: {got} vs {num}");
        };
        for j in 0..4 {
            for k in 0..3 {
                let orig = net.w1[j][k];
                net.w1[j][k] = orig + h;
                let plus = net.raw(&x);
                net.w1[j][k] = orig - h;
                let minus = net.raw(&x);
                net.w1[j][k] = orig;
                check(grads.w1[j][k], plus, minus, "w1");
            }
            let orig = net.b1[j];
            net.b1[j] = orig + h;
            let plus = net.raw(&x);
            net.b1[j] = orig - h;
            let minus = net.raw(&x);
            net.b1[j] = orig;
            check(grads.b1[j], plus, minus, "b1");

            let orig = net.w2[j];
            net.w2[j] = orig + h;
            let plus = net.raw(&x);
            net.w2[j] = orig - h;
            let minus = net.raw(&x);
            net.w2[j] = orig;
            check(grads.w2[j], plus, minus, "w2");
        }
        assert_eq!(grads.b2, 1.0);
    }

    #[test]
    fn threshold_grid_endpoints_and_count() {
        let class = HypothesisClass::threshold_grid(0.0, 0.5, 101, LossKind::ZeroOne);
        let members = class.members().unwrap();
        assert_eq!(members.len(), 101);
        assert_eq!(members[0], Hypothesis::Threshold { c: 0.0 });
        assert_eq!(members[100], Hypothesis::Threshold { c: 0.5 });
        assert_eq!(members[50], Hypothesis::Threshold { c: 0.25 });
    }

    #[test]
    fn induced_rows_enumerate_ordered_pairs() {
        let class = HypothesisClass::threshold_grid(0.0, 1.0, 3, LossKind::ZeroOne);
        let points = vec![vec![0.25], vec![0.75]];
        let rows = induced_loss_rows(&class, &points, 0, 0).unwrap();
        assert_eq!(rows.len(), 9);
        // Pair (h_0, h_1): thresholds 0 and 0.5 disagree exactly on [0, 0.5).
        assert_eq!(rows[1], vec![1.0, 0.0]);
    }

    #[test]
    fn parametric_rows_are_seed_reproducible() {
        let class = HypothesisClass {
            family: ClassFamily::LinearDraws { dim: 2, scale: 1.0 },
            loss: LossKind::BoundedSigmoid,
        };
        let points = vec![vec![0.1, 0.2], vec![-0.5, 1.0], vec![2.0, -1.0]];
        let a = induced_loss_rows(&class, &points, 50, 9).unwrap();
        let b = induced_loss_rows(&class, &points, 50, 9).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, b);
        let c = induced_loss_rows(&class, &points, 50, 10).unwrap();
        assert_ne!(a, c);
    }
}
