//! Structural parameters of a rank-one noncompact Riemannian symmetric space.
//!
//! A space is described by the two root multiplicities `(m_gamma, m_2gamma)`.
//! Everything downstream — the half-sum `rho`, the manifold dimension, the
//! radial volume density, spherical-function coefficients — derives from the
//! pair, so this module is the root of the whole crate.

use crate::error::{Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Multiplicity pair `(m_gamma, m_2gamma)` of a rank-one symmetric space of
/// noncompact type.
///
/// `m_gamma >= 1` always; `m_2gamma = 0` exactly for the real hyperbolic
/// family. The classical families are available as constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankOneSpace {
    m_gamma: u32,
    m_2gamma: u32,
}

/// Classical families of rank-one spaces, used by the CLI and the presets in
/// the test-suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFamily {
    /// Real hyperbolic space H^n(R), `n >= 2`; multiplicities `(n-1, 0)`.
    RealHyperbolic(u32),
    /// Complex hyperbolic space H^m(C), `m >= 2`; multiplicities `(2m-2, 1)`.
    ComplexHyperbolic(u32),
    /// Quaternionic hyperbolic space H^m(H), `m >= 2`; multiplicities `(4m-4, 3)`.
    QuaternionicHyperbolic(u32),
    /// The octonionic hyperbolic plane; multiplicities `(8, 7)`.
    OctonionicPlane,
}

impl RankOneSpace {
    /// Build a space from explicit multiplicities. Rejects `m_gamma = 0`.
    pub fn new(m_gamma: u32, m_2gamma: u32) -> Result<Self> {
        if m_gamma == 0 {
            return Err(Error::InvalidParameter(
                "m_gamma must be at least 1".into(),
            ));
        }
        Ok(Self { m_gamma, m_2gamma })
    }

    /// Build a space from one of the classical families.
    pub fn from_family(family: SpaceFamily) -> Result<Self> {
        match family {
            SpaceFamily::RealHyperbolic(n) => {
                if n < 2 {
                    return Err(Error::InvalidParameter(
                        "real hyperbolic space needs dimension n >= 2".into(),
                    ));
                }
                Self::new(n - 1, 0)
            }
            SpaceFamily::ComplexHyperbolic(m) => {
                if m < 2 {
                    return Err(Error::InvalidParameter(
                        "complex hyperbolic space needs complex dimension m >= 2".into(),
                    ));
                }
                Self::new(2 * m - 2, 1)
            }
            SpaceFamily::QuaternionicHyperbolic(m) => {
                if m < 2 {
                    return Err(Error::InvalidParameter(
                        "quaternionic hyperbolic space needs quaternionic dimension m >= 2".into(),
                    ));
                }
                Self::new(4 * m - 4, 3)
            }
            SpaceFamily::OctonionicPlane => Self::new(8, 7),
        }
    }

    /// Real hyperbolic space H^n(R).
    pub fn real_hyperbolic(n: u32) -> Result<Self> {
        Self::from_family(SpaceFamily::RealHyperbolic(n))
    }

    /// Complex hyperbolic space H^m(C).
    pub fn complex_hyperbolic(m: u32) -> Result<Self> {
        Self::from_family(SpaceFamily::ComplexHyperbolic(m))
    }

    /// Quaternionic hyperbolic space H^m(H).
    pub fn quaternionic_hyperbolic(m: u32) -> Result<Self> {
        Self::from_family(SpaceFamily::QuaternionicHyperbolic(m))
    }

    /// The octonionic hyperbolic plane.
    pub fn octonionic_plane() -> Self {
        Self { m_gamma: 8, m_2gamma: 7 }
    }

    pub fn m_gamma(&self) -> u32 {
        self.m_gamma
    }

    pub fn m_2gamma(&self) -> u32 {
        self.m_2gamma
    }

    /// `2*rho = m_gamma + 2*m_2gamma`, exact in integer arithmetic.
    pub fn two_rho(&self) -> u32 {
        self.m_gamma + 2 * self.m_2gamma
    }

    /// Half-sum of positive roots with multiplicity, `rho = (m_gamma + 2 m_2gamma)/2`.
    pub fn rho(&self) -> f64 {
        f64::from(self.two_rho()) / 2.0
    }

    /// Manifold dimension `n = m_gamma + m_2gamma + 1`, exact.
    pub fn dimension(&self) -> u32 {
        self.m_gamma + self.m_2gamma + 1
    }

    /// Radial volume density `J(t) = (2 sinh t)^{m_gamma + m_2gamma} (cosh t)^{m_2gamma}`.
    ///
    /// The dimensional constant in front of the density is normalized to 1;
    /// every consumer in this crate only ever uses ratios or logarithmic
    /// slopes of `J`, which the constant cannot affect.
    pub fn jacobian(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "jacobian needs finite t >= 0, got {t}"
            )));
        }
        let a = i32::try_from(self.m_gamma + self.m_2gamma).unwrap();
        let b = i32::try_from(self.m_2gamma).unwrap();
        Ok((2.0 * t.sinh()).powi(a) * t.cosh().powi(b))
    }

    /// `ln J(t)`, computed without overflow for large `t`.
    ///
    /// Uses `ln(2 sinh t) = t + ln(1 - e^{-2t})` and
    /// `ln(cosh t) = t - ln 2 + ln(1 + e^{-2t})`, so the result stays accurate
    /// long after `J` itself has left the floating-point range.
    pub fn log_jacobian(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "log_jacobian needs finite t > 0, got {t}"
            )));
        }
        let a = f64::from(self.m_gamma + self.m_2gamma);
        let b = f64::from(self.m_2gamma);
        let e2 = (-2.0 * t).exp();
        let log_2sinh = t + (-e2).ln_1p();
        let log_cosh = t - std::f64::consts::LN_2 + e2.ln_1p();
        Ok(a * log_2sinh + b * log_cosh)
    }

    /// Volume of the geodesic ball of radius `r`: the integral of `J` over `[0, r]`,
    /// by adaptive quadrature with relative tolerance `1e-10`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.ball_volume_with_tol(r, 1e-10)
    }

    /// Ball volume with a caller-chosen relative tolerance.
    pub fn ball_volume_with_tol(&self, r: f64, rel_tol: f64) -> Result<f64> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ball_volume needs finite r >= 0, got {r}"
            )));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        let f = |t: f64| self.jacobian(t).unwrap_or(f64::NAN);
        let (value, _err) = quad::adaptive(&f, 0.0, r, rel_tol, 0.0)?;
        Ok(value)
    }
}

impl std::fmt::Display for RankOneSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m_gamma, self.m_2gamma)
    }
}
