//! Spherical harmonic analysis on rank-one noncompact symmetric spaces.
//!
//! A rank-one space is described by its root multiplicities
//! `(m_gamma, m_2gamma)` — real, complex, quaternionic hyperbolic spaces and
//! the octonionic plane all fit this template. The crate computes, for any
//! such space:
//!
//! - geometry: volume density, ball volumes ([`space`]);
//! - spherical functions `phi_lambda` and the frame expansion
//!   `c(lambda) Phi_lambda + c(-lambda) Phi_{-lambda}` with its coefficient
//!   recursion and `c`-function ([`harish_chandra`]);
//! - radial eigenfunctions of the Laplace–Beltrami operator for general
//!   angular modes, by forward/backward integration and by closed
//!   hypergeometric forms, with defect checks and connection-coefficient
//!   extraction ([`radial`]);
//! - `L^p` growth diagnostics: annulus masses, the
//!   growth/decay/oscillation trichotomy, `L^p` eigenvalue spectra, and
//!   sup-functional dichotomies ([`rellich`]).
//!
//! Every numerical result is backed by an internal cross-check (residuals,
//! conserved quantities, or independent second routes); values that fail
//! their check are reported as errors or flagged, never returned silently.

pub mod error;
pub mod harish_chandra;
pub mod quad;
pub mod radial;
pub mod rellich;
pub mod space;
pub mod special;

pub use error::{Error, Result};
pub use harish_chandra::{
    gamma_coefficients, phi_big, RecursionVariant, SpectralParam, SphericalFunctions,
};
pub use radial::{
    connection_coefficients, frame_solutions, hypergeometric_candidate, residual, solve_forward,
    HypParamSet, ModeIndex, OdeOptions, RadialSolution,
};
pub use rellich::{
    annulus_mass, classify, gamma_p, hardy_functional, lp_spectrum_contains, GrowthClass,
    GrowthReport, HardyResult, LogMass, ModelEigenfunction, ModelKind,
};
pub use space::{RankOneSpace, SpaceFamily};
