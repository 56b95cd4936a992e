//! Annulus growth of eigenfunctions, the `L^p` spectrum, and the Hardy-type
//! sup functional.
//!
//! For an eigenfunction `f` of the Laplace–Beltrami operator and `p >= 1`,
//! the annulus mass
//!
//! ```text
//! M_p(R) = integral over R <= t <= 2R of |f(t)|^p J(t) dt
//! ```
//!
//! (with `J` the radial volume density) follows a sharp trichotomy governed
//! by the distance of `|Im lambda|` from the critical line `gamma_p rho`,
//! `gamma_p = 2/p - 1`: exponential growth inside, linear growth on the
//! line (and for `p = 2` with real `lambda`), exponential decay outside.
//! This module measures the trichotomy (robustly, through an exact
//! annulus-integral model fit rather than a naive log-slope), decides
//! membership in the `L^p` eigenvalue region, and evaluates the weighted
//! sup functional whose finiteness characterizes vanishing at infinity.

use crate::error::{Error, Result};
use crate::harish_chandra::{phi_big, SpectralParam, SphericalFunctions};
use crate::quad;
use crate::radial::{self, ModeIndex, OdeOptions};
use crate::space::RankOneSpace;
use num_complex::Complex64;

/// Critical index `gamma_p = 2/p - 1` (so `gamma_1 = 1`, `gamma_2 = 0`,
/// `gamma_inf = -1`).
pub fn gamma_p(p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent p must be >= 1, got {p}")));
    }
    Ok(2.0 / p - 1.0)
}

/// Does `w` lie in the `L^p` eigenvalue region of the Laplace–Beltrami
/// operator? The region is the closed parabolic set
/// `{ z^2 + rho^2 : |Im z| <= |gamma_p| rho }`; membership is decided in
/// closed form (both square roots of `w - rho^2` have the same `|Im|`),
/// with a `1e-12` tolerance so boundary points count as inside.
pub fn lp_spectrum_contains(space: &RankOneSpace, p: f64, w: Complex64) -> Result<bool> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite(format!("spectral point {w}")));
    }
    let gp = gamma_p(p)?.abs();
    let rho = space.rho();
    let z = (w - rho * rho).sqrt();
    Ok(z.im.abs() <= gp * rho + 1e-12)
}

/// Weight `psi_lambda(t) = e^{(-|Im lambda| - rho) t}` entering the Hardy
/// functional: the sharp radial decay profile at spectral parameter
/// `lambda`.
pub fn psi(space: &RankOneSpace, lambda: SpectralParam, t: f64) -> f64 {
    ((-lambda.value().im.abs() - space.rho()) * t).exp()
}

/// An annulus mass stored as its natural logarithm (masses span hundreds of
/// orders of magnitude across a classification sweep).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMass {
    log_value: f64,
}

impl LogMass {
    pub fn from_ln(log_value: f64) -> Self {
        Self { log_value }
    }

    /// Natural logarithm of the mass.
    pub fn ln(&self) -> f64 {
        self.log_value
    }

    /// The mass itself; overflows to `inf` beyond ~1e308.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    /// Decomposition `mass = mantissa * e^exponent` with mantissa in
    /// `[1, e)`.
    pub fn mantissa_exponent(&self) -> (f64, i64) {
        let e = self.log_value.floor();
        ((self.log_value - e).exp(), e as i64)
    }
}

/// The flavors of model eigenfunction the growth diagnostics understand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// The spherical function `phi_lambda` (both frames, weight `c(+-lambda)`).
    Phi,
    /// The pure frame `Phi_lambda ~ e^{(i lambda - rho) t}`.
    BigPhiPlus,
    /// The reflected frame `Phi_{-lambda} ~ e^{(-i lambda - rho) t}`.
    BigPhiMinus,
    /// A general angular mode, represented by its frame decomposition.
    Mode,
}

struct ModeData {
    mode: ModeIndex,
    c1: Complex64,
    c2: Complex64,
    series_plus: Vec<Complex64>,
    series_minus: Vec<Complex64>,
}

/// A radial eigenfunction that [`annulus_mass`], [`classify`], and
/// [`hardy_functional`] can sample at arbitrary radii.
pub struct ModelEigenfunction {
    kind: ModelKind,
    space: RankOneSpace,
    lambda: SpectralParam,
    sph: SphericalFunctions,
    mode_data: Option<ModeData>,
}

impl ModelEigenfunction {
    /// The spherical function `phi_lambda` (any parameter, lattice points
    /// included).
    pub fn phi(space: RankOneSpace, lambda: SpectralParam) -> Result<Self> {
        Ok(Self {
            kind: ModelKind::Phi,
            space,
            lambda,
            sph: SphericalFunctions::new(space),
            mode_data: None,
        })
    }

    /// The frame `Phi_lambda` (needs a non-lattice parameter).
    pub fn big_phi_plus(space: RankOneSpace, lambda: SpectralParam) -> Result<Self> {
        if lambda.is_excluded() {
            return Err(Error::ExcludedSpectralParam(lambda.value().to_string()));
        }
        Ok(Self {
            kind: ModelKind::BigPhiPlus,
            space,
            lambda,
            sph: SphericalFunctions::new(space),
            mode_data: None,
        })
    }

    /// The reflected frame `Phi_{-lambda}` (needs a non-lattice parameter).
    pub fn big_phi_minus(space: RankOneSpace, lambda: SpectralParam) -> Result<Self> {
        if lambda.is_excluded() {
            return Err(Error::ExcludedSpectralParam(lambda.value().to_string()));
        }
        Ok(Self {
            kind: ModelKind::BigPhiMinus,
            space,
            lambda,
            sph: SphericalFunctions::new(space),
            mode_data: None,
        })
    }

    /// A general angular mode: the regular radial solution for `(p, q)`,
    /// represented past `t = 1` by its decomposition over the two frames
    /// (coefficients extracted once, by backward integration and a
    /// cross-validated 2x2 solve).
    pub fn mode(space: RankOneSpace, lambda: SpectralParam, mode: ModeIndex) -> Result<Self> {
        if lambda.is_excluded() {
            return Err(Error::ExcludedSpectralParam(lambda.value().to_string()));
        }
        let opts = OdeOptions::default();
        let grid = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5];
        let forward = radial::solve_forward(&space, lambda, mode, &grid, &opts)?;
        let (plus, minus) = radial::frame_solutions(&space, lambda, mode, &grid, &opts)?;
        let (ta, tb, tc) = radial::choose_probes(&plus, &minus)?;
        let cc = radial::connection_coefficients(&forward, &plus, &minus, ta, tb, tc)?;
        const SERIES_TERMS: usize = 64;
        let series_plus =
            radial::frame_expansion_coefficients(&space, lambda, mode, true, SERIES_TERMS)?;
        let series_minus =
            radial::frame_expansion_coefficients(&space, lambda, mode, false, SERIES_TERMS)?;
        Ok(Self {
            kind: ModelKind::Mode,
            space,
            lambda,
            sph: SphericalFunctions::new(space),
            mode_data: Some(ModeData { mode, c1: cc.c1, c2: cc.c2, series_plus, series_minus }),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn space(&self) -> RankOneSpace {
        self.space
    }

    pub fn lambda(&self) -> SpectralParam {
        self.lambda
    }

    /// Angular mode index (for [`ModelKind::Mode`]).
    pub fn mode_index(&self) -> Option<ModeIndex> {
        self.mode_data.as_ref().map(|d| d.mode)
    }

    /// Frame coefficients `(c1, c2)` of a mode model.
    pub fn connection(&self) -> Option<(Complex64, Complex64)> {
        self.mode_data.as_ref().map(|d| (d.c1, d.c2))
    }

    /// Smallest radius this model can be evaluated at.
    pub fn t_floor(&self) -> f64 {
        match self.kind {
            ModelKind::Phi => 0.0,
            ModelKind::BigPhiPlus | ModelKind::BigPhiMinus => radial::T_MIN,
            ModelKind::Mode => 1.0,
        }
    }

    /// Value at radius `t`.
    pub fn evaluate(&self, t: f64) -> Result<Complex64> {
        if !(t.is_finite() && t >= self.t_floor()) {
            return Err(Error::InvalidParameter(format!(
                "model evaluation needs t >= {}, got {t}",
                self.t_floor()
            )));
        }
        match self.kind {
            ModelKind::Phi => self.sph.spherical_phi(self.lambda, t),
            ModelKind::BigPhiPlus => phi_big(&self.space, self.lambda, t),
            ModelKind::BigPhiMinus => phi_big(&self.space, self.lambda.negated(), t),
            ModelKind::Mode => {
                let d = self.mode_data.as_ref().expect("mode data present");
                let rho = self.space.rho();
                let ilam = Complex64::new(0.0, 1.0) * self.lambda.value();
                let x = (-2.0 * t).exp();
                let sum = |coeff: &[Complex64]| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut w = 1.0;
                    for &c in coeff {
                        acc += c * w;
                        w *= x;
                    }
                    acc
                };
                let up = ((ilam - rho) * t).exp() * sum(&d.series_plus);
                let um = ((-ilam - rho) * t).exp() * sum(&d.series_minus);
                Ok(d.c1 * up + d.c2 * um)
            }
        }
    }
}

/// Default relative tolerance for annulus masses.
pub const MASS_REL_TOL: f64 = 1e-8;

/// `L^p` mass of `f` over the annulus `[R, 2R]`, computed entirely in log
/// space so exponentially large and small masses are equally accurate.
pub fn annulus_mass(f: &ModelEigenfunction, p: f64, big_r: f64) -> Result<LogMass> {
    annulus_mass_with_tol(f, p, big_r, MASS_REL_TOL)
}

pub fn annulus_mass_with_tol(
    f: &ModelEigenfunction,
    p: f64,
    big_r: f64,
    rel_tol: f64,
) -> Result<LogMass> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mass exponent p must be finite and >= 1, got {p}"
        )));
    }
    if !(big_r.is_finite() && big_r > 0.0 && big_r >= f.t_floor()) {
        return Err(Error::InvalidParameter(format!(
            "annulus start must satisfy R >= {}, got {big_r}",
            f.t_floor().max(f64::MIN_POSITIVE)
        )));
    }
    let space = f.space;
    let g = move |t: f64| -> f64 {
        let v = match f.evaluate(t) {
            Ok(v) => v.norm(),
            Err(_) => return f64::NAN, // surfaces as a quadrature error
        };
        let lj = match space.log_jacobian(t) {
            Ok(l) => l,
            Err(_) => return f64::NAN,
        };
        p * v.ln() + lj
    };
    let log = quad::log_integral(&g, big_r, 2.0 * big_r, rel_tol)?;
    Ok(LogMass::from_ln(log))
}

/// Trichotomy classes for annulus-mass growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    ExponentialGrowth,
    Linear,
    ExponentialDecay,
    /// The masses do not follow a clean exponential/linear law (e.g.
    /// oscillatory integrands for real parameters with `p != 2`).
    Indeterminate,
}

impl std::fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GrowthClass::ExponentialGrowth => "exponential-growth",
            GrowthClass::Linear => "linear",
            GrowthClass::ExponentialDecay => "exponential-decay",
            GrowthClass::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

/// Envelope of the limiting squared profile `e^{2 rho t} |f(t)|^2` for
/// oscillatory (real-parameter, two-frame) eigenfunctions: the modulus
/// beats between `lower` and `upper` with the given period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationEnvelope {
    pub lower: f64,
    pub upper: f64,
    pub period: f64,
}

/// Everything [`classify`] measured about a model's annulus growth.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// `(R, mass)` samples, in the order requested.
    pub masses: Vec<(f64, LogMass)>,
    /// Rate `a` of the best-fitting model `M(R) ~ C e^{a t}` integrated
    /// exactly over annuli (for `a = 0` the model degenerates to `C R`).
    pub fitted_rate: f64,
    /// Root-mean-square log-residual of that fit.
    pub fit_rms: f64,
    /// Closed-form rate `p (gamma_p rho - Im lambda)` (sign per model),
    /// when the theory pins one down.
    pub predicted_rate: Option<f64>,
    pub predicted_class: GrowthClass,
    pub measured_class: GrowthClass,
    /// Present when the measured class is [`GrowthClass::Indeterminate`]
    /// for an oscillatory two-frame model.
    pub envelope: Option<OscillationEnvelope>,
}

/// Dead band around zero inside which a fitted rate counts as linear.
pub const RATE_DEAD_BAND: f64 = 0.02;

/// RMS log-residual above which the exponential/linear fit is rejected.
pub const FIT_RMS_LIMIT: f64 = 0.1;

/// Exact log-mass of the model integrand `C e^{a t}` over `[R, 2R]`
/// (with `C = 1`): `ln[(e^{2aR} - e^{aR}) / a]`, continuous through
/// `a = 0` where it becomes `ln R`.
fn annulus_model_log(a: f64, big_r: f64) -> f64 {
    if a.abs() < 1e-12 {
        big_r.ln() + 1.5 * a * big_r
    } else {
        let x = a * big_r;
        // ln(e^x (e^x - 1)/a) = x + ln(expm1(x)/a), stable for either sign.
        x + (x.exp_m1() / a).ln()
    }
}

fn fit_rate(radii: &[f64], logs: &[f64], scan_half_width: f64) -> (f64, f64) {
    let n = radii.len() as f64;
    let rss = |a: f64| -> f64 {
        let mut mean = 0.0;
        for (&r, &y) in radii.iter().zip(logs) {
            mean += y - annulus_model_log(a, r);
        }
        mean /= n;
        let mut acc = 0.0;
        for (&r, &y) in radii.iter().zip(logs) {
            let d = y - annulus_model_log(a, r) - mean;
            acc += d * d;
        }
        acc
    };

    // Coarse scan, then golden-section refinement around the best cell.
    let m = 481;
    let mut best_a = 0.0;
    let mut best_v = f64::INFINITY;
    let step = 2.0 * scan_half_width / (m - 1) as f64;
    for i in 0..m {
        let a = -scan_half_width + i as f64 * step;
        let v = rss(a);
        if v < best_v {
            best_v = v;
            best_a = a;
        }
    }
    let (mut lo, mut hi) = (best_a - step, best_a + step);
    let phi_ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi_ratio * (hi - lo);
    let mut x2 = lo + phi_ratio * (hi - lo);
    let (mut f1, mut f2) = (rss(x1), rss(x2));
    for _ in 0..70 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi_ratio * (hi - lo);
            f1 = rss(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi_ratio * (hi - lo);
            f2 = rss(x2);
        }
    }
    let a = 0.5 * (lo + hi);
    (a, (rss(a) / n).sqrt())
}

/// Measure the growth trichotomy of `f`'s annulus `L^p` masses over the
/// given starting radii and compare with the predicted class.
///
/// The fitted rate comes from matching the samples against the exact
/// annulus integral of an exponential profile (a naive log-mass slope
/// would read `2a` for growing masses but `a` for decaying ones and is
/// never used). Classification: a clean fit with all available doubling
/// pairs `M(2R)/M(R)` in `[1.5, 2.5]` and `|a| <=` [`RATE_DEAD_BAND`] is
/// linear; otherwise the sign of `a` decides, a poor fit
/// (rms > [`FIT_RMS_LIMIT`]) or an oscillatory real-parameter integrand
/// with `p != 2` is reported indeterminate rather than misclassified.
pub fn classify(f: &ModelEigenfunction, p: f64, radii: &[f64]) -> Result<GrowthReport> {
    if radii.len() < 3 {
        return Err(Error::InvalidParameter(
            "classification needs at least three annulus radii".into(),
        ));
    }
    for w in radii.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(
                "annulus radii must be strictly increasing".into(),
            ));
        }
    }

    let mut masses = Vec::with_capacity(radii.len());
    for &r in radii {
        masses.push((r, annulus_mass(f, p, r)?));
    }
    let logs: Vec<f64> = masses.iter().map(|(_, m)| m.ln()).collect();

    // Predicted rate from the frame exponent the model rides on.
    let rho = f.space.rho();
    let gp = gamma_p(p)?;
    let im = f.lambda.value().im;
    let lambda_real = im.abs() <= 1e-12;
    let im_eff = match f.kind {
        ModelKind::BigPhiPlus => Some(im),
        ModelKind::BigPhiMinus => Some(-im),
        ModelKind::Phi | ModelKind::Mode => {
            if lambda_real {
                None
            } else {
                Some(im.abs())
            }
        }
    };
    let predicted_rate = im_eff.map(|b| p * (gp * rho - b));
    let predicted_class = match predicted_rate {
        Some(a) if a > 1e-9 => GrowthClass::ExponentialGrowth,
        Some(a) if a < -1e-9 => GrowthClass::ExponentialDecay,
        Some(_) => GrowthClass::Linear,
        None => {
            // Real-parameter two-frame models: the theory gives linear
            // growth only at p = 2; elsewhere the masses oscillate.
            if (p - 2.0).abs() <= 1e-12 {
                GrowthClass::Linear
            } else {
                GrowthClass::Indeterminate
            }
        }
    };

    let scan = predicted_rate.map_or(16.0, |a| (2.0 * a.abs() + 8.0).max(16.0));
    let (fitted_rate, fit_rms) = fit_rate(radii, &logs, scan);

    // Doubling-pair ratio test on whatever pairs the grid contains.
    let mut pair_ratios = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        for (j, &r2) in radii.iter().enumerate() {
            if (r2 - 2.0 * r).abs() <= 1e-9 * (1.0 + r2.abs()) {
                pair_ratios.push((logs[j] - logs[i]).exp());
            }
        }
    }
    let pairs_linear = !pair_ratios.is_empty()
        && pair_ratios.iter().all(|&q| (1.5..=2.5).contains(&q));

    let oscillatory = lambda_real
        && matches!(f.kind, ModelKind::Phi | ModelKind::Mode)
        && (p - 2.0).abs() > 1e-12;
    let measured_class = if oscillatory || fit_rms > FIT_RMS_LIMIT {
        GrowthClass::Indeterminate
    } else if fitted_rate.abs() <= RATE_DEAD_BAND {
        if pair_ratios.is_empty() || pairs_linear {
            GrowthClass::Linear
        } else {
            GrowthClass::Indeterminate
        }
    } else if fitted_rate > 0.0 {
        GrowthClass::ExponentialGrowth
    } else {
        GrowthClass::ExponentialDecay
    };

    let envelope = if measured_class == GrowthClass::Indeterminate {
        oscillation_envelope(f).ok().flatten()
    } else {
        None
    };

    Ok(GrowthReport {
        masses,
        fitted_rate,
        fit_rms,
        predicted_rate,
        predicted_class,
        measured_class,
        envelope,
    })
}

/// Envelope of `e^{2 rho t} |f(t)|^2` for a two-frame model with real
/// parameter: bounds `(|c1| -+ |c2|)^2` and beat period `pi / |lambda|`.
/// `Ok(None)` when the model is a single frame or the coefficients are
/// unavailable.
pub fn oscillation_envelope(f: &ModelEigenfunction) -> Result<Option<OscillationEnvelope>> {
    let lam = f.lambda.value();
    if lam.norm() == 0.0 {
        return Ok(None);
    }
    let (c1, c2) = match f.kind {
        ModelKind::Phi => {
            if f.lambda.is_excluded() {
                return Ok(None);
            }
            let c1 = f.sph.c_function(f.lambda)?;
            let c2 = f.sph.c_function(f.lambda.negated())?;
            (c1, c2)
        }
        ModelKind::Mode => match f.connection() {
            Some(pair) => pair,
            None => return Ok(None),
        },
        ModelKind::BigPhiPlus | ModelKind::BigPhiMinus => return Ok(None),
    };
    let (a, b) = (c1.norm(), c2.norm());
    Ok(Some(OscillationEnvelope {
        lower: (a - b) * (a - b),
        upper: (a + b) * (a + b),
        period: std::f64::consts::PI / lam.norm(),
    }))
}

/// Result of the Hardy-type sup functional.
#[derive(Debug, Clone, Copy)]
pub struct HardyResult {
    /// `sup_t  t^eps |f(t)| / psi_lambda(t)` over the grid.
    pub sup_value: f64,
    /// Natural log of the sup (reliable even when the sup overflows).
    pub log_sup: f64,
    /// Whether the running sup is still climbing: the sup over the full
    /// grid exceeds the sup over the first half (in `t`) by the factor
    /// `max(2^{eps/2}, 1.001)`.
    pub divergence_flag: bool,
    /// Natural log of the running sup at half the final radius.
    pub log_sup_half: f64,
}

/// Weighted sup functional
/// `sup_t t^eps psi_lambda(t)^{-1} (mean of |f|^p over the sphere of radius t)^{1/p}`.
///
/// All models here are radial, so the spherical `L^p` mean reduces to
/// `|f(t)|` for every `p` (the exponent is validated but does not affect
/// the value). Finiteness of this sup for some `eps > 0` forces an
/// eigenfunction of exterior type to vanish; `eps = 0` is the sharp
/// threshold, and the divergence flag measures which side of it `f` is on.
pub fn hardy_functional(
    f: &ModelEigenfunction,
    p: f64,
    eps: f64,
    t_grid: &[f64],
) -> Result<HardyResult> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent p must be >= 1, got {p}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    if t_grid.len() < 4 {
        return Err(Error::InvalidParameter(
            "the sup functional needs at least four radii".into(),
        ));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
        }
    }
    if !(t_grid[0] > 0.0 && t_grid[0] >= f.t_floor()) {
        return Err(Error::InvalidParameter(format!(
            "radii must start at or above {}",
            f.t_floor().max(f64::MIN_POSITIVE)
        )));
    }

    let rho = f.space.rho();
    let decay = f.lambda.value().im.abs() + rho; // -ln psi / t
    let t_max = t_grid[t_grid.len() - 1];
    let t_half = t_max / 2.0;
    let mut log_sup = f64::NEG_INFINITY;
    let mut log_sup_half = f64::NEG_INFINITY;
    for &t in t_grid {
        let v = f.evaluate(t)?.norm();
        let lh = eps * t.ln() + v.ln() + decay * t;
        if lh > log_sup {
            log_sup = lh;
        }
        if t <= t_half && lh > log_sup_half {
            log_sup_half = lh;
        }
    }
    if !log_sup.is_finite() {
        return Err(Error::NonFinite("sup functional".into()));
    }
    let threshold = (0.5 * eps * std::f64::consts::LN_2).max(1e-3_f64.ln_1p());
    let divergence_flag = log_sup - log_sup_half >= threshold;
    Ok(HardyResult { sup_value: log_sup.exp(), log_sup, divergence_flag, log_sup_half })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sp(re: f64, im: f64) -> SpectralParam {
        SpectralParam::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn critical_index_values() {
        assert_eq!(gamma_p(1.0).unwrap(), 1.0);
        assert_eq!(gamma_p(2.0).unwrap(), 0.0);
        assert_relative_eq!(gamma_p(4.0 / 3.0).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(gamma_p(f64::INFINITY).unwrap(), -1.0);
        assert!(gamma_p(0.5).is_err());
    }

    #[test]
    fn spectrum_membership_closed_form() {
        let h3 = RankOneSpace::new(2, 0).unwrap();
        // p = 2: the half-line [rho^2, inf).
        assert!(lp_spectrum_contains(&h3, 2.0, Complex64::new(1.0, 0.0)).unwrap());
        assert!(lp_spectrum_contains(&h3, 2.0, Complex64::new(5.0, 0.0)).unwrap());
        assert!(!lp_spectrum_contains(&h3, 2.0, Complex64::new(5.0, 0.1)).unwrap());
        assert!(!lp_spectrum_contains(&h3, 2.0, Complex64::new(0.5, 0.0)).unwrap());
        // p = 1: |Im z| <= rho, so w = 0 (z = i rho) is a boundary point.
        assert!(lp_spectrum_contains(&h3, 1.0, Complex64::new(0.0, 0.0)).unwrap());
        assert!(!lp_spectrum_contains(&h3, 1.0, Complex64::new(-0.44, 0.0)).unwrap());
        assert!(lp_spectrum_contains(&h3, 1.0, Complex64::new(0.75, 0.0)).unwrap());
    }

    #[test]
    fn log_mass_accessors_roundtrip() {
        let m = LogMass::from_ln(3.7);
        let (mant, e) = m.mantissa_exponent();
        assert_eq!(e, 3);
        assert!((1.0..std::f64::consts::E).contains(&mant));
        assert_relative_eq!(mant * (e as f64).exp(), m.value(), max_relative = 1e-14);
        let tiny = LogMass::from_ln(-900.0);
        assert_eq!(tiny.value(), 0.0); // underflows as a plain f64
        assert_eq!(tiny.mantissa_exponent().1, -900);
    }

    #[test]
    fn annulus_mass_matches_h3_closed_form() {
        // On (2,0) with lambda = 1: |phi|^2 J = 4 sin^2 t, whose annulus
        // integral is 2R - sin 4R + sin 2R.
        let h3 = RankOneSpace::new(2, 0).unwrap();
        let f = ModelEigenfunction::phi(h3, sp(1.0, 0.0)).unwrap();
        for &r in &[2.0, 5.0, 9.0] {
            let m = annulus_mass(&f, 2.0, r).unwrap();
            let exact = 2.0 * r - (4.0 * r).sin() + (2.0 * r).sin();
            assert_relative_eq!(m.value(), exact, max_relative = 1e-7);
        }
    }

    #[test]
    fn annulus_mass_is_tolerance_stable() {
        let ch2 = RankOneSpace::new(2, 1).unwrap();
        let f = ModelEigenfunction::big_phi_plus(ch2, sp(0.5, 0.7)).unwrap();
        let a = annulus_mass_with_tol(&f, 1.0, 6.0, 1e-8).unwrap();
        let b = annulus_mass_with_tol(&f, 1.0, 6.0, 1e-10).unwrap();
        assert!((a.ln() - b.ln()).abs() <= 1e-7);
    }

    #[test]
    fn frame_decay_classifies_as_exponential_decay() {
        // Strongly damped frame: |Im lambda| far outside the critical line.
        let h3 = RankOneSpace::new(2, 0).unwrap();
        let f = ModelEigenfunction::big_phi_plus(h3, sp(0.5, 2.0)).unwrap();
        let radii = [4.0, 5.0, 6.0, 8.0, 10.0, 12.0];
        let rep = classify(&f, 1.0, &radii).unwrap();
        assert_eq!(rep.measured_class, GrowthClass::ExponentialDecay);
        assert_eq!(rep.predicted_class, GrowthClass::ExponentialDecay);
        let expected = 1.0 * (1.0 * 1.0 - 2.0); // p (gamma_p rho - Im lambda)
        assert!(
            (rep.fitted_rate - expected).abs() <= 0.05,
            "rate {} vs {expected}",
            rep.fitted_rate
        );
    }

    #[test]
    fn frame_growth_classifies_as_exponential_growth() {
        let h3 = RankOneSpace::new(2, 0).unwrap();
        let f = ModelEigenfunction::big_phi_plus(h3, sp(0.5, 0.25)).unwrap();
        let radii = [4.0, 5.0, 6.0, 8.0, 10.0, 12.0];
        let rep = classify(&f, 1.0, &radii).unwrap();
        assert_eq!(rep.measured_class, GrowthClass::ExponentialGrowth);
        let expected = 0.75;
        assert!((rep.fitted_rate - expected).abs() <= 0.05);
    }

    #[test]
    fn critical_line_classifies_as_linear() {
        // p = 2, real lambda, single frame: the mass grows linearly.
        let h3 = RankOneSpace::new(2, 0).unwrap();
        let f = ModelEigenfunction::big_phi_plus(h3, sp(0.5, 0.0)).unwrap();
        let radii = [4.0, 5.0, 6.0, 8.0, 10.0, 12.0];
        let rep = classify(&f, 2.0, &radii).unwrap();
        assert_eq!(rep.measured_class, GrowthClass::Linear);
        assert_eq!(rep.predicted_class, GrowthClass::Linear);
        assert!(rep.fitted_rate.abs() <= RATE_DEAD_BAND);
    }

    #[test]
    fn oscillatory_masses_are_reported_indeterminate_with_envelope() {
        let h3 = RankOneSpace::new(2, 0).unwrap();
        let f = ModelEigenfunction::phi(h3, sp(1.0, 0.0)).unwrap();
        let radii = [4.0, 5.0, 6.0, 8.0, 10.0, 12.0];
        let rep = classify(&f, 1.0, &radii).unwrap();
        assert_eq!(rep.measured_class, GrowthClass::Indeterminate);
        assert_eq!(rep.predicted_class, GrowthClass::Indeterminate);
        let env = rep.envelope.expect("envelope for oscillatory case");
        // Real lambda: |c(-lambda)| = |c(lambda)|, so the lower envelope
        // collapses to zero and the beat period is pi/|lambda|.
        assert!(env.lower <= 1e-12 * env.upper);
        assert_relative_eq!(env.period, std::f64::consts::PI, max_relative = 1e-12);
        assert!(env.upper > 0.0);
    }

    #[test]
    fn mode_model_reproduces_the_forward_solution() {
        let ch2 = RankOneSpace::new(2, 1).unwrap();
        let mode = ModeIndex::new(1, 1, &ch2).unwrap();
        let l = sp(0.8, -0.4);
        let f = ModelEigenfunction::mode(ch2, l, mode).unwrap();
        let grid = [2.0, 3.0];
        let direct =
            radial::solve_forward(&ch2, l, mode, &grid, &OdeOptions::default()).unwrap();
        for &t in &grid {
            let a = f.evaluate(t).unwrap();
            let (b, _) = direct.value_at(t).unwrap();
            assert!(
                (a - b).norm() <= 1e-6 * b.norm(),
                "t = {t}: model {a} vs integrated {b}"
            );
        }
    }

    #[test]
    fn hardy_dichotomy_on_a_frame() {
        // Grid from t = 1 so the polynomial factor governs the running sup.
        let h3 = RankOneSpace::new(2, 0).unwrap();
        let f = ModelEigenfunction::big_phi_plus(h3, sp(1.0, 0.5)).unwrap();
        let grid: Vec<f64> = (0..=156).map(|i| 1.0 + 0.25 * i as f64).collect();
        let flat = hardy_functional(&f, 2.0, 0.0, &grid).unwrap();
        assert!(!flat.divergence_flag, "eps = 0 must not be flagged divergent");
        let climb = hardy_functional(&f, 2.0, 0.1, &grid).unwrap();
        assert!(climb.divergence_flag, "eps = 0.1 must be flagged divergent");
        // The running sup grows like T^eps: one doubling multiplies it by
        // 2^0.1.
        let ratio = climb.log_sup - climb.log_sup_half;
        assert!(
            (ratio - 0.1 * std::f64::consts::LN_2).abs() <= 0.1 * 0.1 * std::f64::consts::LN_2,
            "doubling ratio {ratio}"
        );
    }

    #[test]
    fn psi_weight_is_the_sharp_decay_profile() {
        let ch2 = RankOneSpace::new(2, 1).unwrap();
        let v = psi(&ch2, sp(1.0, -0.5), 2.0);
        assert_relative_eq!(v, (-5.0_f64).exp(), max_relative = 1e-14);
    }
}
