//! Error taxonomy shared by all kernel modules.

use thiserror::Error;

/// Errors raised by the numerical kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    /// An argument that must be nonzero was zero (e.g. the Laurent-series variable).
    #[error("zero argument passed to {0}")]
    ZeroArgument(&'static str),

    /// Input lies outside the admissible domain (e.g. Im tau below the guard).
    #[error("domain error: {0}")]
    Domain(String),

    /// The series/product truncation cannot reach the requested tolerance under the cap.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A theta-function denominator fell below the singularity guard.
    #[error("argument too close to a theta zero (|value| = {magnitude:.3e})")]
    NearSingular { magnitude: f64 },

    /// Presence/absence of the spectral parameter contradicts the variant.
    #[error("variant mismatch for {variant}: {reason}")]
    VariantMismatch {
        variant: &'static str,
        reason: &'static str,
    },

    /// Matrix inversion was refused because the condition estimate is too large.
    #[error("matrix ill-conditioned (condition estimate {cond:.3e})")]
    IllConditioned { cond: f64 },

    /// Doubling the Fourier sample count moved a Laurent coefficient too much.
    #[error("Fourier extraction aliased (doubling moved the value by {delta:.3e})")]
    Aliasing { delta: f64 },

    /// Richardson refinement of a numerical derivative failed to settle.
    #[error("numerical derivative unstable (Richardson disagreement {delta:.3e})")]
    DerivativeUnstable { delta: f64 },

    /// Power-series division requires an invertible leading coefficient.
    #[error("series inversion failed: {0}")]
    SeriesInversion(String),

    /// A guard (separation, theta zero, conditioning) tripped during flow integration.
    #[error("guard tripped at step {step}: {reason}")]
    GuardTripped { step: usize, reason: String },

    /// A constructor received parameters violating its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;
