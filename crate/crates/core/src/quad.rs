//! Adaptive one-dimensional quadrature.
//!
//! A Gauss–Kronrod 7/15 rule drives worst-interval-first bisection. The
//! module also provides a logarithmic front-end used for integrands of the
//! form `exp(g(t))` whose values overflow `f64` long before their logarithms
//! become awkward.

use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15 table).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_3,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod panel: returns `(kronrod, |kronrod - gauss|)`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

const MAX_PANELS: usize = 4000;

/// Integrate `f` over `[a, b]` to the requested tolerances.
///
/// Returns `(value, error_estimate)`. The target is
/// `max(abs_tol, rel_tol * |value|)` on the summed Kronrod error; bisection
/// always splits the panel with the largest error estimate, so the budget is
/// spent where the integrand is hardest.
pub fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v0, e0) = gk15(f, a, b);
    if !v0.is_finite() {
        return Err(Error::Quadrature(
            "integrand produced a non-finite value".into(),
        ));
    }
    let mut panels = vec![Panel { a, b, value: v0, err: e0 }];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "panel budget exhausted: error {err:.3e} on value {total:.6e}"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        for (lo, hi) in [(pa, mid), (mid, pb)] {
            let (v, e) = gk15(f, lo, hi);
            if !v.is_finite() {
                return Err(Error::Quadrature(
                    "integrand produced a non-finite value".into(),
                ));
            }
            panels.push(Panel { a: lo, b: hi, value: v, err: e });
        }
    }
}

/// Integrate `exp(g(t))` over `[a, b]` and return the logarithm of the result.
///
/// `g` may range over thousands; the integrand is shifted by the sampled
/// maximum of `g` before exponentiation so the actual quadrature only ever
/// sees values in `[0, 1]`. `g` may return `-inf` (a zero of the integrand)
/// but not `NaN` or `+inf`.
pub fn log_integral(g: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Quadrature(format!(
            "log_integral needs a finite interval with a < b, got [{a}, {b}]"
        )));
    }
    const SCAN: usize = 65;
    let mut peak = f64::NEG_INFINITY;
    for i in 0..SCAN {
        let t = a + (b - a) * (i as f64) / ((SCAN - 1) as f64);
        let v = g(t);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::Quadrature(format!(
                "log-integrand returned {v} at t = {t}"
            )));
        }
        peak = peak.max(v);
    }
    if peak == f64::NEG_INFINITY {
        return Err(Error::Quadrature(
            "log-integrand is identically -inf on the scan grid".into(),
        ));
    }
    let shifted = |t: f64| (g(t) - peak).exp();
    let (value, _err) = adaptive(&shifted, a, b, rel_tol, 0.0)?;
    if value <= 0.0 {
        return Err(Error::Quadrature(
            "shifted integrand integrated to a non-positive value".into(),
        ));
    }
    Ok(peak + value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_and_trig_reference_values() {
        let (v, _) = adaptive(&|x| x * x, 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-13);
        let (v, _) = adaptive(&|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 0.0).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn steep_exponential_is_resolved() {
        // Integral of e^{20 t} over [0, 10]: (e^{200} - 1)/20.
        let (v, _) = adaptive(&|x| (20.0 * x).exp(), 0.0, 10.0, 1e-10, 0.0).unwrap();
        let exact = (200f64.exp() - 1.0) / 20.0;
        assert_relative_eq!(v, exact, max_relative = 1e-9);
    }

    #[test]
    fn log_integral_survives_huge_exponents() {
        // Integral of e^{1000 t} over [0, 1]: log = 1000 + log1p(-e^{-1000}) - log(1000).
        let lv = log_integral(&|t| 1000.0 * t, 0.0, 1.0, 1e-10).unwrap();
        let exact = 1000.0 - 1000f64.ln();
        assert_relative_eq!(lv, exact, max_relative = 1e-12);
    }

    #[test]
    fn log_integral_tolerates_isolated_zeros() {
        // |sin t| has zeros inside the window; its log dips to -inf there.
        let lv = log_integral(&|t| t.sin().abs().ln(), 0.1, 3.1, 1e-9).unwrap();
        // Integral of sin over [0.1, 3.1] = cos(0.1) - cos(3.1).
        let exact = (0.1f64.cos() - 3.1f64.cos()).ln();
        assert_relative_eq!(lv, exact, max_relative = 1e-8);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(adaptive(&|x| x, 0.0, f64::INFINITY, 1e-8, 0.0).is_err());
        assert!(log_integral(&|_| 0.0, 1.0, 1.0, 1e-8).is_err());
        assert!(log_integral(&|_| f64::NAN, 0.0, 1.0, 1e-8).is_err());
    }
}
