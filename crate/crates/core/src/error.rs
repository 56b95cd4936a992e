//! Error type shared by all numerical modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A structural parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A non-finite number reached an API boundary.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// The spectral parameter sits on the excluded lattice (Re λ = 0, Im λ ∈ ℤ),
    /// where the expansion coefficients are singular.
    #[error("spectral parameter {0} lies on the excluded lattice i·Z")]
    ExcludedSpectralParam(String),

    /// Evaluation requested at a pole.
    #[error("pole encountered at {0}")]
    Pole(String),

    /// A series failed to reach the requested tolerance.
    #[error("series did not converge: {0}")]
    NonConvergent(String),

    /// Intermediate quantities exceeded the floating-point range.
    #[error("overflow in {context} at index {index}")]
    Overflow { context: String, index: usize },

    /// The adaptive integrator could not meet its tolerance.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// The ODE integrator failed (step collapse or step budget exhausted).
    #[error("integration failed: {0}")]
    Integration(String),

    /// A computed solution failed its own self-check.
    #[error("numerical validation failed: {0}")]
    Validation(String),

    /// A linear extraction was too ill-conditioned to trust.
    #[error("ill-conditioned system: condition number {0:.3e}")]
    IllConditioned(f64),

    /// A probe point is not available in a sampled solution.
    #[error("probe point {0} is outside the sampled domain")]
    ProbeOutsideDomain(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
