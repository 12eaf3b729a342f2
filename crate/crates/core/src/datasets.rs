//! Domains, label-access control, and benchmark task generators.
//!
//! A [`Domain`] is a feature distribution plus a ground-truth labelling.
//! Densities come in three flavours: uniform intervals (integrated in
//! closed form by the threshold machinery), finite atom sets, and i.i.d.
//! sample clouds. Truths are either a labelling hypothesis (covariate
//! shift) or raw scores attached per sample point.
//!
//! A [`DomainPair`] bundles a source and a target domain and gates access
//! to target labels: under [`LabelAccess::Blinded`] any attempt to touch
//! the target truth returns [`Error::LabelsBlinded`], while target
//! *features* stay available. Training code only ever sees source labels
//! and target features, so a blinded pair must produce bitwise-identical
//! runs — tests rely on that.
//!
//! Generators:
//!
//! - [`threshold_domains`] — 1-D step-hypothesis pair: μ = U[0,1],
//!   ν = U[0,2], both labelled by the step at 1/2.
//! - [`gaussian_shift`] — standard normal source, target mean shifted
//!   along the first coordinate; returns the closed-form feature KL
//!   divergence shift²/2 as a calibration oracle.
//! - [`two_moons`] — interleaved half-circle classes with Gaussian noise;
//!   the target cloud is rotated about the moons' midpoint, the classic
//!   covariate-shift stress test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypotheses::{risk, Hypothesis, LossKind, HARD_SCORE};

/// Feature distribution of a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// Uniform on [lo, hi].
    UniformInterval { lo: f64, hi: f64 },
    /// Finite support with one probability per atom.
    Discrete { probs: Vec<f64> },
    /// Empirical cloud of feature vectors, uniformly weighted.
    Sample { points: Vec<Vec<f64>> },
}

impl Density {
    /// Feature dimension, when the density has one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Density::UniformInterval { .. } => Some(1),
            Density::Discrete { .. } => None,
            Density::Sample { points } => points.first().map(|p| p.len()),
        }
    }

    /// Number of atoms or sample points, when finite.
    pub fn len(&self) -> Option<usize> {
        match self {
            Density::UniformInterval { .. } => None,
            Density::Discrete { probs } => Some(probs.len()),
            Density::Sample { points } => Some(points.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Density::UniformInterval { lo, hi } => {
                if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "uniform interval needs lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            Density::Discrete { probs } => {
                if probs.is_empty() || probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidInput(
                        "atom probabilities must be non-negative and finite".into(),
                    ));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "atom probabilities sum to {total}, expected 1"
                    )));
                }
            }
            Density::Sample { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidInput("empty sample cloud".into()));
                }
                let d = points[0].len();
                if points.iter().any(|p| p.len() != d) {
                    return Err(Error::InvalidInput("ragged sample cloud".into()));
                }
            }
        }
        Ok(())
    }
}

/// Ground-truth labelling of a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    /// A labelling hypothesis evaluated wherever needed.
    Hyp(Hypothesis),
    /// One raw truth score per sample point (hard label = score ≥ 0).
    PerPoint(Vec<f64>),
}

/// A feature distribution with its ground-truth labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    density: Density,
    truth: Truth,
}

impl Domain {
    pub fn new(density: Density, truth: Truth) -> Self {
        Domain { density, truth }
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn truth(&self) -> &Truth {
        &self.truth
    }

    /// Sample points, when the density is an empirical cloud.
    pub fn sample_points(&self) -> Option<&[Vec<f64>]> {
        match &self.density {
            Density::Sample { points } => Some(points),
            _ => None,
        }
    }

    /// Hard truth labels per sample point (sampled densities only).
    pub fn hard_labels(&self) -> Result<Vec<bool>> {
        let points = self.sample_points().ok_or_else(|| {
            Error::InvalidInput("per-point labels require a sampled density".into())
        })?;
        match &self.truth {
            Truth::PerPoint(raws) => Ok(raws.iter().map(|r| *r >= 0.0).collect()),
            Truth::Hyp(h) => points.iter().map(|x| h.label(x)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.density.validate()?;
        if let (Truth::PerPoint(raws), Some(n)) = (&self.truth, self.density.len()) {
            if raws.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{} truth scores for {} points",
                    raws.len(),
                    n
                )));
            }
        }
        Ok(())
    }
}

/// Whether target-domain labels may be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelAccess {
    Oracle,
    Blinded,
}

/// A source/target domain pair with target-label gating.
#[derive(Debug, Clone)]
pub struct DomainPair {
    source: Domain,
    target: Domain,
    access: LabelAccess,
}

impl DomainPair {
    pub fn new(source: Domain, target: Domain, access: LabelAccess) -> Self {
        DomainPair {
            source,
            target,
            access,
        }
    }

    pub fn oracle(source: Domain, target: Domain) -> Self {
        Self::new(source, target, LabelAccess::Oracle)
    }

    /// The same pair with target labels sealed off.
    pub fn blinded(mut self) -> Self {
        self.access = LabelAccess::Blinded;
        self
    }

    pub fn access(&self) -> LabelAccess {
        self.access
    }

    /// Source domain, labels included — always available.
    pub fn source(&self) -> &Domain {
        &self.source
    }

    /// Target features — always available.
    pub fn target_density(&self) -> &Density {
        &self.target.density
    }

    /// Full target domain; errors when the pair is blinded.
    pub fn target(&self) -> Result<&Domain> {
        match self.access {
            LabelAccess::Oracle => Ok(&self.target),
            LabelAccess::Blinded => Err(Error::LabelsBlinded),
        }
    }

    pub fn source_risk(&self, h: &Hypothesis, loss: LossKind) -> Result<f64> {
        risk(h, &self.source, loss)
    }

    pub fn target_risk(&self, h: &Hypothesis, loss: LossKind) -> Result<f64> {
        risk(h, self.target()?, loss)
    }

    pub fn target_accuracy(&self, h: &Hypothesis) -> Result<f64> {
        Ok(1.0 - self.target_risk(h, LossKind::ZeroOne)?)
    }
}

/// 1-D step-hypothesis benchmark: source U[0,1], target U[0,2], both
/// labelled by the threshold at 1/2.
pub fn threshold_domains() -> DomainPair {
    let truth = Hypothesis::Threshold { c: 0.5 };
    DomainPair::oracle(
        Domain::new(
            Density::UniformInterval { lo: 0.0, hi: 1.0 },
            Truth::Hyp(truth.clone()),
        ),
        Domain::new(
            Density::UniformInterval { lo: 0.0, hi: 2.0 },
            Truth::Hyp(truth),
        ),
    )
}

/// Source N(0, I_d), target N(shift·e₁, I_d), labels from the fixed
/// hyperplane w = 1/√d·(1, …, 1). Returns the pair and the exact feature
/// KL divergence between the two normals, shift²/2.
pub fn gaussian_shift(
    dim: usize,
    shift: f64,
    n_source: usize,
    n_target: usize,
    seed: u64,
) -> (DomainPair, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw_cloud = |count: usize, mean_shift: f64| -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| {
                (0..dim)
                    .map(|k| {
                        let z: f64 = rng.sample(rand_distr::StandardNormal);
                        if k == 0 {
                            z + mean_shift
                        } else {
                            z
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let source = draw_cloud(n_source, 0.0);
    let target = draw_cloud(n_target, shift);
    let w = vec![1.0 / (dim as f64).sqrt(); dim];
    let truth = Hypothesis::Linear { w, b: 0.0 };
    let pair = DomainPair::oracle(
        Domain::new(Density::Sample { points: source }, Truth::Hyp(truth.clone())),
        Domain::new(Density::Sample { points: target }, Truth::Hyp(truth)),
    );
    (pair, shift * shift / 2.0)
}

/// Midpoint between the two moon arcs; rotation pivots here.
const MOONS_PIVOT: (f64, f64) = (0.5, 0.25);

fn sample_moons(rng: &mut ChaCha8Rng, count: usize, noise: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut points = Vec::with_capacity(count);
    let mut raws = Vec::with_capacity(count);
    for _ in 0..count {
        let upper = rng.gen_bool(0.5);
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let (bx, by) = if upper {
            (theta.cos(), theta.sin())
        } else {
            (1.0 - theta.cos(), 0.5 - theta.sin())
        };
        let nx: f64 = rng.sample(rand_distr::StandardNormal);
        let ny: f64 = rng.sample(rand_distr::StandardNormal);
        points.push(vec![bx + noise * nx, by + noise * ny]);
        raws.push(if upper { -HARD_SCORE } else { HARD_SCORE });
    }
    (points, raws)
}

fn rotate_cloud(points: &mut [Vec<f64>], degrees: f64) {
    if degrees == 0.0 {
        return;
    }
    let rad = degrees.to_radians();
    let (sin, cos) = rad.sin_cos();
    let (cx, cy) = MOONS_PIVOT;
    for p in points {
        let dx = p[0] - cx;
        let dy = p[1] - cy;
        p[0] = cx + cos * dx - sin * dy;
        p[1] = cy + sin * dx + cos * dy;
    }
}

/// Interleaved half-circle classes. The source cloud is the standard
/// configuration; the target cloud is freshly sampled and rotated by
/// `rotation_deg` about the midpoint between the arcs, so the larger the
/// rotation, the harsher the covariate shift.
pub fn two_moons(
    rotation_deg: f64,
    n_source: usize,
    n_target: usize,
    noise: f64,
    seed: u64,
) -> DomainPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (source_points, source_raws) = sample_moons(&mut rng, n_source, noise);
    let (mut target_points, target_raws) = sample_moons(&mut rng, n_target, noise);
    rotate_cloud(&mut target_points, rotation_deg);
    DomainPair::oracle(
        Domain::new(
            Density::Sample {
                points: source_points,
            },
            Truth::PerPoint(source_raws),
        ),
        Domain::new(
            Density::Sample {
                points: target_points,
            },
            Truth::PerPoint(target_raws),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::LossKind;

    #[test]
    fn threshold_domains_risks() {
        let pair = threshold_domains();
        let h = Hypothesis::Threshold { c: 0.25 };
        assert_eq!(pair.source_risk(&h, LossKind::ZeroOne).unwrap(), 0.25);
        assert_eq!(pair.target_risk(&h, LossKind::ZeroOne).unwrap(), 0.125);
        // The shared truth has zero risk on both domains.
        let t = Hypothesis::Threshold { c: 0.5 };
        assert_eq!(pair.source_risk(&t, LossKind::ZeroOne).unwrap(), 0.0);
        assert_eq!(pair.target_risk(&t, LossKind::ZeroOne).unwrap(), 0.0);
    }

    #[test]
    fn blinded_pairs_seal_target_labels_only() {
        let pair = threshold_domains().blinded();
        assert_eq!(pair.access(), LabelAccess::Blinded);
        let h = Hypothesis::Threshold { c: 0.25 };
        assert!(matches!(pair.target(), Err(Error::LabelsBlinded)));
        assert!(matches!(
            pair.target_risk(&h, LossKind::ZeroOne),
            Err(Error::LabelsBlinded)
        ));
        assert!(matches!(
            pair.target_accuracy(&h),
            Err(Error::LabelsBlinded)
        ));
        // Features and source labels stay open.
        assert_eq!(
            pair.target_density(),
            &Density::UniformInterval { lo: 0.0, hi: 2.0 }
        );
        assert_eq!(pair.source_risk(&h, LossKind::ZeroOne).unwrap(), 0.25);
    }

    #[test]
    fn gaussian_shift_is_deterministic_with_known_divergence() {
        let (a, kl_a) = gaussian_shift(3, 1.5, 64, 48, 11);
        let (b, kl_b) = gaussian_shift(3, 1.5, 64, 48, 11);
        assert_eq!(kl_a, 1.125);
        assert_eq!(kl_b, 1.125);
        assert_eq!(a.source().sample_points(), b.source().sample_points());
        assert_eq!(
            a.target().unwrap().sample_points(),
            b.target().unwrap().sample_points()
        );

        // Empirical first-coordinate means straddle the shift.
        let (big, _) = gaussian_shift(2, 2.0, 4000, 4000, 0);
        let mean_coord0 = |pts: &[Vec<f64>]| -> f64 {
            pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64
        };
        assert!(mean_coord0(big.source().sample_points().unwrap()).abs() < 0.1);
        assert!(
            (mean_coord0(big.target().unwrap().sample_points().unwrap()) - 2.0).abs() < 0.1
        );
    }

    #[test]
    fn two_moons_rotation_acts_on_the_same_draws() {
        let base = two_moons(0.0, 200, 150, 0.1, 5);
        let spun = two_moons(30.0, 200, 150, 0.1, 5);
        // Identical seeds share the pre-rotation stream, so the rotated
        // target must match a manual rotation of the unrotated target.
        assert_eq!(
            base.source().sample_points(),
            spun.source().sample_points()
        );
        let mut expected = base.target().unwrap().sample_points().unwrap().to_vec();
        rotate_cloud(&mut expected, 30.0);
        let got = spun.target().unwrap().sample_points().unwrap();
        for (e, g) in expected.iter().zip(got) {
            assert!((e[0] - g[0]).abs() < 1e-12 && (e[1] - g[1]).abs() < 1e-12);
        }
        // Labels survive rotation untouched.
        assert_eq!(
            base.target().unwrap().hard_labels().unwrap(),
            spun.target().unwrap().hard_labels().unwrap()
        );
    }

    #[test]
    fn two_moons_classes_are_roughly_balanced() {
        let pair = two_moons(0.0, 1000, 1000, 0.1, 0);
        let frac = |labels: &[bool]| {
            labels.iter().filter(|l| **l).count() as f64 / labels.len() as f64
        };
        let src = pair.source().hard_labels().unwrap();
        let tgt = pair.target().unwrap().hard_labels().unwrap();
        assert!((frac(&src) - 0.5).abs() < 0.06);
        assert!((frac(&tgt) - 0.5).abs() < 0.06);
        // Clouds stay near the unit-scale arcs.
        for p in pair.source().sample_points().unwrap() {
            assert!(p[0] > -2.0 && p[0] < 3.0 && p[1] > -1.5 && p[1] < 2.0);
        }
    }

    #[test]
    fn per_point_truth_risk_and_validation() {
        let domain = Domain::new(
            Density::Sample {
                points: vec![vec![0.2], vec![0.6], vec![0.9]],
            },
            Truth::PerPoint(vec![-HARD_SCORE, HARD_SCORE, -HARD_SCORE]),
        );
        domain.validate().unwrap();
        // Threshold at 0.5 labels (0, 1, 1); truth is (0, 1, 0) → one miss.
        let h = Hypothesis::Threshold { c: 0.5 };
        let r = risk(&h, &domain, LossKind::ZeroOne).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15);

        let bad = Domain::new(
            Density::Sample {
                points: vec![vec![0.2]],
            },
            Truth::PerPoint(vec![1.0, 2.0]),
        );
        assert!(bad.validate().is_err());
    }
}
