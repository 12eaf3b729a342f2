//! Error type shared across the crate.
//!
//! Numerical routines here fail loudly instead of silently saturating:
//! conjugate-domain violations name the offending atom, unbounded
//! maximisations are reported as such, and label reads that a blinded
//! domain pair must not answer are hard errors.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A witness value (after shift/scale) left the domain of the convex
    /// conjugate φ*. Reported with the atom index and the offending value.
    #[error("value {value} at atom {atom} is outside the domain of the conjugate of `{kernel}`")]
    ConjugateDomain {
        kernel: String,
        atom: usize,
        value: f64,
    },

    /// The requested quantity needs a single conjugate, but the kernel is a
    /// weighted composite without one.
    #[error("kernel `{kernel}` is a weighted composite and has no single conjugate")]
    CompositeKernel { kernel: String },

    /// Absolute-continuity violation in an exact divergence: an atom with
    /// positive p-mass has zero q-mass.
    #[error("distribution is not absolutely continuous: atom `{atom}` has p={p} but q=0")]
    NotAbsolutelyContinuous { atom: String, p: f64 },

    /// A maximisation kept improving at the edge of the search bracket even
    /// after the allowed expansions; the objective is unbounded above.
    #[error("objective for `{context}` is unbounded above (bracket grew to [{lo}, {hi}])")]
    Unbounded { context: String, lo: f64, hi: f64 },

    /// A variance in a closed-form optimiser is (numerically) zero.
    #[error("degenerate variance in `{context}`: {value}")]
    DegenerateVariance { context: String, value: f64 },

    /// Target labels were requested from a blinded domain pair.
    #[error("target labels are hidden on a blinded domain pair")]
    LabelsBlinded,

    /// Mismatched or otherwise invalid input shapes.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A hypothesis cannot be evaluated on the given domain representation.
    #[error("hypothesis `{hypothesis}` cannot be evaluated on {domain} data")]
    Incompatible { hypothesis: String, domain: String },

    /// The localisation radius excluded every hypothesis.
    #[error("no hypothesis has source risk <= {level} (minimum attainable is {min_risk})")]
    EmptyRashomonSet { level: f64, min_risk: f64 },

    /// A requirement of a bound is not met by its inputs.
    #[error("bound precondition failed: {0}")]
    BoundPrecondition(String),

    /// Root finding failed inside the stated bracket.
    #[error("no root of `{context}` in [{lo}, {hi}]")]
    NoRoot { context: String, lo: f64, hi: f64 },
}
