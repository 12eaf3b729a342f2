//! Convex divergence kernels and exact f-divergences on finite supports.
//!
//! An f-divergence between distributions P and Q with density ratio
//! x = dP/dQ is D_φ(P‖Q) = E_Q[φ(x)] for a convex kernel φ with φ(1) = 0.
//! The kernels here:
//!
//! | kind         | φ(x)                  | φ*(y)            | dom φ*   | φ″(1) |
//! |--------------|-----------------------|------------------|----------|-------|
//! | `kl`         | x·ln x − x + 1        | eʸ − 1           | ℝ        | 1     |
//! | `reverse_kl` | −ln x                 | −1 − ln(−y)      | y < 0    | 1     |
//! | `chi2`       | (x − 1)²              | y²/4 + y         | ℝ        | 2     |
//! | `jeffreys`   | γ₁·φ_kl + γ₂·(x−1−ln x) | — (composite)  | —        | γ₁+γ₂ |
//!
//! The KL kernel is the *normalised* one (x·ln x − x + 1 rather than
//! x·ln x), which keeps φ ≥ 0 and gives the conjugate eʸ − 1 without a
//! shift. The Jeffreys kernel is kept as the weighted pair
//! (γ₁ · forward KL, γ₂ · reverse KL); it has no single closed-form
//! conjugate, so conjugate-based operations report it as composite and the
//! variational layer combines the two KL forms instead.
//!
//! The shifted kernel ψ(x) = φ(x + 1) has conjugate ψ*(y) = φ*(y) − y,
//! which is ≥ 0 whenever φ(1) = 0; several cumulant computations rely on
//! this.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for "probabilities sum to one".
const MASS_TOL: f64 = 1e-9;

/// Supported divergence kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhiKind {
    Kl,
    ReverseKl,
    Chi2,
    /// Weighted Jeffreys: γ_fwd · KL(P‖Q) + γ_rev · KL(Q‖P).
    Jeffreys { gamma_fwd: f64, gamma_rev: f64 },
}

/// A divergence kernel together with its conjugate machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSpec {
    kind: PhiKind,
}

impl PhiSpec {
    pub fn new(kind: PhiKind) -> Result<Self> {
        if let PhiKind::Jeffreys {
            gamma_fwd,
            gamma_rev,
        } = kind
        {
            if !(gamma_fwd >= 0.0 && gamma_rev >= 0.0 && gamma_fwd + gamma_rev > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "jeffreys weights must be non-negative and not both zero, got ({gamma_fwd}, {gamma_rev})"
                )));
            }
        }
        Ok(Self { kind })
    }

    pub fn kl() -> Self {
        Self { kind: PhiKind::Kl }
    }

    pub fn reverse_kl() -> Self {
        Self {
            kind: PhiKind::ReverseKl,
        }
    }

    pub fn chi2() -> Self {
        Self {
            kind: PhiKind::Chi2,
        }
    }

    pub fn jeffreys(gamma_fwd: f64, gamma_rev: f64) -> Result<Self> {
        Self::new(PhiKind::Jeffreys {
            gamma_fwd,
            gamma_rev,
        })
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    /// True for kernels represented as a weighted pair of simpler kernels.
    pub fn is_composite(&self) -> bool {
        matches!(self.kind, PhiKind::Jeffreys { .. })
    }

    /// Kernel name in the form accepted by [`PhiSpec::parse`].
    pub fn name(&self) -> String {
        match self.kind {
            PhiKind::Kl => "kl".into(),
            PhiKind::ReverseKl => "reverse_kl".into(),
            PhiKind::Chi2 => "chi2".into(),
            PhiKind::Jeffreys {
                gamma_fwd,
                gamma_rev,
            } => format!("jeffreys:{gamma_fwd},{gamma_rev}"),
        }
    }

    /// Parse `"kl"`, `"reverse_kl"`, `"chi2"`, or `"jeffreys:<γ_fwd>,<γ_rev>"`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "kl" => Ok(Self::kl()),
            "reverse_kl" => Ok(Self::reverse_kl()),
            "chi2" => Ok(Self::chi2()),
            _ => {
                if let Some(rest) = s.strip_prefix("jeffreys:") {
                    let parts: Vec<&str> = rest.split(',').collect();
                    if parts.len() == 2 {
                        let g1: f64 = parts[0].trim().parse().map_err(|_| {
                            Error::InvalidInput(format!("bad jeffreys weight `{}`", parts[0]))
                        })?;
                        let g2: f64 = parts[1].trim().parse().map_err(|_| {
                            Error::InvalidInput(format!("bad jeffreys weight `{}`", parts[1]))
                        })?;
                        return Self::jeffreys(g1, g2);
                    }
                }
                Err(Error::InvalidInput(format!(
                    "unknown kernel `{s}` (expected kl, reverse_kl, chi2, or jeffreys:<g1>,<g2>)"
                )))
            }
        }
    }

    /// Kernel value φ(x) for a density ratio x ≥ 0. Limits at x = 0 are
    /// taken (x·ln x → 0), so KL and χ² give φ(0) = 1 while kernels with a
    /// −ln x term diverge to +∞ there.
    pub fn phi(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::InvalidInput(format!(
                "density ratio must be non-negative, got {x}"
            )));
        }
        Ok(match self.kind {
            PhiKind::Kl => kl_phi(x),
            PhiKind::ReverseKl => {
                if x == 0.0 {
                    f64::INFINITY
                } else {
                    -x.ln()
                }
            }
            PhiKind::Chi2 => (x - 1.0) * (x - 1.0),
            PhiKind::Jeffreys {
                gamma_fwd,
                gamma_rev,
            } => {
                // Reverse component: x·φ_kl(1/x) = x − 1 − ln x.
                let rev = if x == 0.0 {
                    f64::INFINITY
                } else {
                    x - 1.0 - x.ln()
                };
                gamma_fwd * kl_phi(x) + gamma_rev * rev
            }
        })
    }

    /// Convex conjugate φ*(y), or an error naming `atom` when `y` falls
    /// outside the conjugate's domain. Composite kernels have no single
    /// conjugate and always error.
    pub fn phi_star_at(&self, y: f64, atom: usize) -> Result<f64> {
        match self.kind {
            PhiKind::Kl => Ok(y.exp() - 1.0),
            PhiKind::ReverseKl => {
                if y < 0.0 {
                    Ok(-1.0 - (-y).ln())
                } else {
                    Err(Error::ConjugateDomain {
                        kernel: self.name(),
                        atom,
                        value: y,
                    })
                }
            }
            PhiKind::Chi2 => Ok(y * y / 4.0 + y),
            PhiKind::Jeffreys { .. } => Err(Error::CompositeKernel {
                kernel: self.name(),
            }),
        }
    }

    /// Convex conjugate without atom context (reported as atom 0).
    pub fn phi_star(&self, y: f64) -> Result<f64> {
        self.phi_star_at(y, 0)
    }

    /// Conjugate of the recentred kernel ψ(x) = φ(x + 1): ψ*(y) = φ*(y) − y.
    /// Non-negative for every kernel with φ(1) = 0.
    pub fn psi_star(&self, y: f64) -> Result<f64> {
        Ok(self.phi_star(y)? - y)
    }

    /// Open/closed bounds of the conjugate domain, as (lo, hi). Infinite
    /// ends are `f64::NEG_INFINITY` / `f64::INFINITY`; the reverse-KL domain
    /// is (−∞, 0).
    pub fn conjugate_domain(&self) -> Result<(f64, f64)> {
        match self.kind {
            PhiKind::Kl | PhiKind::Chi2 => Ok((f64::NEG_INFINITY, f64::INFINITY)),
            PhiKind::ReverseKl => Ok((f64::NEG_INFINITY, 0.0)),
            PhiKind::Jeffreys { .. } => Err(Error::CompositeKernel {
                kernel: self.name(),
            }),
        }
    }

    /// Second derivative φ″(1). Both KL kernels give 1, χ² gives 2, a
    /// Jeffreys composite sums its weights.
    pub fn curvature_at_one(&self) -> f64 {
        match self.kind {
            PhiKind::Kl | PhiKind::ReverseKl => 1.0,
            PhiKind::Chi2 => 2.0,
            PhiKind::Jeffreys {
                gamma_fwd,
                gamma_rev,
            } => gamma_fwd + gamma_rev,
        }
    }

    /// Lipschitz constant of φ* on [0, b], from the closed-form derivative:
    /// eᵇ for KL, b/2 + 1 for χ². Errors for kernels whose conjugate is
    /// undefined on [0, b] (reverse KL) or composite (Jeffreys).
    pub fn lipschitz_on(&self, b: f64) -> Result<f64> {
        if !(b > 0.0) {
            return Err(Error::InvalidInput(format!(
                "lipschitz range must have b > 0, got {b}"
            )));
        }
        match self.kind {
            PhiKind::Kl => Ok(b.exp()),
            PhiKind::Chi2 => Ok(b / 2.0 + 1.0),
            PhiKind::ReverseKl => Err(Error::InvalidInput(
                "conjugate of reverse_kl is undefined on [0, b]".into(),
            )),
            PhiKind::Jeffreys { .. } => Err(Error::CompositeKernel {
                kernel: self.name(),
            }),
        }
    }
}

/// Normalised KL kernel with the x → 0 limit taken.
fn kl_phi(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x * x.ln() - x + 1.0
    }
}

/// A probability distribution on a finite set of named atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<String>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates: matching lengths, non-negative masses, total mass 1
    /// within 1e-9.
    pub fn new(atoms: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if atoms.len() != probs.len() {
            return Err(Error::InvalidInput(format!(
                "{} atoms but {} masses",
                atoms.len(),
                probs.len()
            )));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidInput("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid mass {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { atoms, probs })
    }

    /// Atoms named by index: "0", "1", ...
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let atoms = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(atoms, probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Exact D_φ(P‖Q) = Σᵢ qᵢ · φ(pᵢ/qᵢ) over a shared finite support.
///
/// Atoms with qᵢ = 0 and pᵢ > 0 violate absolute continuity and error with
/// the atom name; atoms with pᵢ = qᵢ = 0 contribute nothing. The reverse-KL
/// kernel evaluates as KL(Q‖P) (so the roles in its continuity requirement
/// swap), and a Jeffreys composite evaluates as the weighted sum of its two
/// KL components.
pub fn exact_f_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    phi: &PhiSpec,
) -> Result<f64> {
    if p.atoms != q.atoms {
        return Err(Error::InvalidInput(
            "distributions must share an identical ordered support".into(),
        ));
    }
    match phi.kind {
        PhiKind::ReverseKl => exact_f_divergence(q, p, &PhiSpec::kl()),
        PhiKind::Jeffreys {
            gamma_fwd,
            gamma_rev,
        } => {
            let kl = PhiSpec::kl();
            Ok(gamma_fwd * exact_f_divergence(p, q, &kl)?
                + gamma_rev * exact_f_divergence(q, p, &kl)?)
        }
        _ => {
            let mut total = 0.0;
            for ((atom, &pi), &qi) in p.atoms.iter().zip(&p.probs).zip(&q.probs) {
                if qi == 0.0 {
                    if pi > 0.0 {
                        return Err(Error::NotAbsolutelyContinuous {
                            atom: atom.clone(),
                            p: pi,
                        });
                    }
                    continue;
                }
                total += qi * phi.phi(pi / qi)?;
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bern(p1: f64) -> DiscreteDistribution {
        DiscreteDistribution::new(vec!["1".into(), "0".into()], vec![p1, 1.0 - p1]).unwrap()
    }

    #[test]
    fn kernels_vanish_at_one() {
        for phi in [
            PhiSpec::kl(),
            PhiSpec::reverse_kl(),
            PhiSpec::chi2(),
            PhiSpec::jeffreys(0.5, 0.5).unwrap(),
        ] {
            assert_eq!(phi.phi(1.0).unwrap(), 0.0, "{}", phi.name());
        }
    }

    #[test]
    fn conjugate_dominates_identity() {
        // ψ*(y) = φ*(y) − y ≥ 0 is the Fenchel-Young inequality at x = 1
        // (φ(1) = 0). Checked on a grid for both closed-form conjugates.
        for phi in [PhiSpec::kl(), PhiSpec::chi2()] {
            for i in -40..=40 {
                let y = i as f64 * 0.25;
                assert!(phi.psi_star(y).unwrap() >= 0.0, "{} at {}", phi.name(), y);
            }
        }
        // Reverse KL on its own (negative) domain: u − 1 ≥ ln u for u = −y.
        let rev = PhiSpec::reverse_kl();
        for i in 1..=40 {
            let y = -(i as f64) * 0.25;
            assert!(rev.psi_star(y).unwrap() >= 0.0);
        }
    }

    #[test]
    fn reverse_kl_conjugate_rejects_non_negative_values() {
        let rev = PhiSpec::reverse_kl();
        let err = rev.phi_star_at(0.25, 7).unwrap_err();
        match err {
            Error::ConjugateDomain { atom, value, .. } => {
                assert_eq!(atom, 7);
                assert_eq!(value, 0.25);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn composite_kernel_has_no_single_conjugate() {
        let j = PhiSpec::jeffreys(1.0, 1.0).unwrap();
        assert!(j.is_composite());
        assert!(matches!(
            j.phi_star(0.0),
            Err(Error::CompositeKernel { .. })
        ));
        assert!(matches!(
            j.lipschitz_on(1.0),
            Err(Error::CompositeKernel { .. })
        ));
    }

    #[test]
    fn exact_divergences_on_a_bernoulli_pair() {
        // P = Bern(0.75), Q = Bern(0.5).
        let p = bern(0.75);
        let q = bern(0.5);

        // KL(P‖Q) = 0.75·ln 1.5 + 0.25·ln 0.5 = 0.13081203...
        let kl = exact_f_divergence(&p, &q, &PhiSpec::kl()).unwrap();
        assert!((kl - 0.130_812_035_941_137).abs() < 1e-12);

        // χ²(P‖Q) = 0.25² / 0.5 + 0.25² / 0.5 = 0.25.
        let chi2 = exact_f_divergence(&p, &q, &PhiSpec::chi2()).unwrap();
        assert!((chi2 - 0.25).abs() < 1e-15);

        // Reverse kernel gives KL(Q‖P) = 0.5·ln(2/3) + 0.5·ln 2 = 0.14384103...
        let rkl = exact_f_divergence(&p, &q, &PhiSpec::reverse_kl()).unwrap();
        assert!((rkl - 0.143_841_036_225_890).abs() < 1e-12);

        // Jeffreys(1,1) = KL + reverse KL; for Bernoullis this telescopes to
        // (p₁ − q₁)·(logit p₁ − logit q₁) = 0.25·ln 3.
        let j = exact_f_divergence(&p, &q, &PhiSpec::jeffreys(1.0, 1.0).unwrap()).unwrap();
        assert!((j - 0.25 * 3.0_f64.ln()).abs() < 1e-12);
        assert!((j - (kl + rkl)).abs() < 1e-12);
    }

    #[test]
    fn absolute_continuity_violations_name_the_atom() {
        let p = DiscreteDistribution::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        let q = DiscreteDistribution::new(vec!["a".into(), "b".into()], vec![1.0, 0.0]).unwrap();
        match exact_f_divergence(&p, &q, &PhiSpec::kl()).unwrap_err() {
            Error::NotAbsolutelyContinuous { atom, p } => {
                assert_eq!(atom, "b");
                assert_eq!(p, 0.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // Shared null atoms are fine: KL((1,0)‖(0.5,0.5)) = ln 2.
        let p2 = DiscreteDistribution::new(vec!["a".into(), "b".into()], vec![1.0, 0.0]).unwrap();
        let q2 = DiscreteDistribution::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        let d = exact_f_divergence(&p2, &q2, &PhiSpec::kl()).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn kl_log_chi2_sandwich_on_random_pairs() {
        // KL(P‖Q) ≤ ln(1 + χ²(P‖Q)) ≤ χ²(P‖Q).
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let k = rng.gen_range(2..6);
            let draw = |rng: &mut ChaCha8Rng| {
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let s: f64 = raw.iter().sum();
                DiscreteDistribution::from_probs(raw.iter().map(|x| x / s).collect()).unwrap()
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let kl = exact_f_divergence(&p, &q, &PhiSpec::kl()).unwrap();
            let chi2 = exact_f_divergence(&p, &q, &PhiSpec::chi2()).unwrap();
            assert!(kl <= (1.0 + chi2).ln() + 1e-12);
            assert!((1.0 + chi2).ln() <= chi2 + 1e-12);
        }
    }

    #[test]
    fn lipschitz_constants_match_a_numerical_sweep() {
        for (phi, b) in [
            (PhiSpec::kl(), 1.0),
            (PhiSpec::kl(), 2.5),
            (PhiSpec::chi2(), 1.0),
            (PhiSpec::chi2(), 4.0),
        ] {
            let l = phi.lipschitz_on(b).unwrap();
            let mut worst: f64 = 0.0;
            let n = 400;
            for i in 0..n {
                let y0 = b * i as f64 / n as f64;
                let y1 = b * (i + 1) as f64 / n as f64;
                let slope =
                    (phi.phi_star(y1).unwrap() - phi.phi_star(y0).unwrap()) / (y1 - y0);
                worst = worst.max(slope.abs());
            }
            assert!(worst <= l + 1e-9, "{} on [0,{}]: {} > {}", phi.name(), b, worst, l);
        }
        assert!((PhiSpec::kl().lipschitz_on(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(PhiSpec::chi2().lipschitz_on(1.0).unwrap(), 1.5);
    }

    #[test]
    fn parse_round_trips() {
        for name in ["kl", "reverse_kl", "chi2", "jeffreys:0.5,0.5"] {
            assert_eq!(PhiSpec::parse(name).unwrap().name(), name);
        }
        assert!(PhiSpec::parse("hellinger").is_err());
        assert!(PhiSpec::parse("jeffreys:-1,1").is_err());
        assert!(PhiSpec::parse("jeffreys:0,0").is_err());
    }

    #[test]
    fn curvatures() {
        assert_eq!(PhiSpec::kl().curvature_at_one(), 1.0);
        assert_eq!(PhiSpec::reverse_kl().curvature_at_one(), 1.0);
        assert_eq!(PhiSpec::chi2().curvature_at_one(), 2.0);
        assert_eq!(
            PhiSpec::jeffreys(0.5, 0.5).unwrap().curvature_at_one(),
            1.0
        );
    }
}
