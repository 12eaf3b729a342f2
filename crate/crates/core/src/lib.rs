//! Variational f-divergence discrepancies between domains, the risk bounds
//! built on top of them, and a small full-batch adversarial trainer that
//! minimises those discrepancies on toy transfer tasks.
//!
//! The crate is organised bottom-up:
//!
//! - [`phi`] — convex divergence kernels φ (KL, reverse KL, χ², Jeffreys)
//!   together with their convex conjugates and exact divergences on finite
//!   distributions.
//! - [`variational`] — the weak, shifted, and scaled variational objectives
//!   that lower-bound a divergence from a single witness function.
//! - [`hypotheses`] — hypothesis representations (thresholds, score tables,
//!   linear and one-hidden-layer MLP scorers), disagreement losses, risks.
//! - [`datasets`] — source/target domain pairs: an analytic threshold task,
//!   a mean-shifted Gaussian task, and rotated two-moons samples.
//! - [`discrepancy`] — hypothesis-class discrepancies: the absolute
//!   (two-sided) discrepancy, the variational discrepancy with optimised
//!   scale, its localisation to low-risk subclasses, and cumulant profiles.
//! - [`bounds`] — target-risk bound assemblies, fast-rate constant solving,
//!   and Monte-Carlo Rademacher complexity.
//! - [`trainer`] — the alternating min/max trainer with seeded, fully
//!   deterministic trajectories.

pub mod bounds;
pub mod datasets;
pub mod discrepancy;
pub mod error;
pub mod hypotheses;
pub mod phi;
pub mod search;
pub mod trainer;
pub mod variational;

pub use error::{Error, Result};
pub use phi::{DiscreteDistribution, PhiKind, PhiSpec};
pub use variational::{VariationalResult, WitnessValues};
