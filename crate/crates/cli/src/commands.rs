//! The seven subcommands: argument structs, execution, and exit-code
//! mapping.
//!
//! Every command resolves a space, computes its payload (fanning grid
//! evaluations out over the worker pool where the work is per-point),
//! builds the CSV/JSON outputs deterministically, and embeds a
//! [`crate::manifest::RunManifest`] in the JSON report.

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::PathBuf;

use rankone::radial::{
    choose_probes, connection_coefficients, frame_solutions, solve_forward, ModeIndex, OdeOptions,
};
use rankone::rellich::MASS_REL_TOL;
use rankone::{
    classify, gamma_p, hardy_functional, lp_spectrum_contains, Error, GrowthClass,
    ModelEigenfunction, RankOneSpace, SpectralParam, SphericalFunctions,
};

use crate::manifest::{complex_json, emit, emit_report, float_field, CsvDoc, RunManifest, SpaceDescriptor};
use crate::parse::{parse_complex, parse_family, FamilyArg};

/// Failure carrying the documented exit code.
///
/// 2 = validation, 3 = excluded spectral parameter, 4 = strict-mode
/// classification failure, 5 = numerical failure. (Exit 2 is shared with
/// clap's own usage errors.)
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Excluded(String),
    Strict(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Excluded(_) => 3,
            Failure::Strict(_) => 4,
            Failure::Numerical(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m)
            | Failure::Excluded(m)
            | Failure::Strict(m)
            | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Validation(e.to_string()),
            // The expansion's weight function has its poles exactly on the
            // excluded lattice, so both error kinds mean the same thing to
            // a caller.
            Error::ExcludedSpectralParam(_) | Error::Pole(_) => Failure::Excluded(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn parse_complex_cli(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

/// Space selection shared by every command: either a family preset or an
/// explicit multiplicity pair. Defaults to `real:3`.
#[derive(Args, Debug, Clone)]
pub struct SpaceSelect {
    /// Family preset: real:N, complex:M, quat:M, or oct [default: real:3].
    #[arg(long)]
    family: Option<String>,
    /// Short-root multiplicity (with --m2g, overrides --family).
    #[arg(long, requires = "m2g", conflicts_with = "family")]
    mg: Option<u32>,
    /// Long-root multiplicity (with --mg).
    #[arg(long, requires = "mg", conflicts_with = "family")]
    m2g: Option<u32>,
}

impl SpaceSelect {
    fn resolve(&self) -> Result<(RankOneSpace, Option<String>), Failure> {
        if let (Some(mg), Some(m2g)) = (self.mg, self.m2g) {
            return Ok((RankOneSpace::new(mg, m2g)?, None));
        }
        let text = self.family.clone().unwrap_or_else(|| "real:3".to_string());
        let family = parse_family(&text).map_err(Failure::Validation)?;
        let space = match family {
            FamilyArg::Real(n) => RankOneSpace::real_hyperbolic(n)?,
            FamilyArg::Complex(m) => RankOneSpace::complex_hyperbolic(m)?,
            FamilyArg::Quaternionic(m) => RankOneSpace::quaternionic_hyperbolic(m)?,
            FamilyArg::Octonionic => RankOneSpace::octonionic_plane(),
        };
        Ok((space, Some(text)))
    }
}

/// Output routing shared by the CSV-producing commands.
#[derive(Args, Debug, Clone)]
pub struct OutputSelect {
    /// Write the CSV to this file instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON report to this file instead of stderr.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Series,
    Ode,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelArg {
    /// The spherical function (both frames, weighted by c(+-lambda)).
    Phi,
    /// The outgoing frame, asymptotic to e^{(i lambda - rho) t}.
    PhiPlus,
    /// The incoming frame, asymptotic to e^{(-i lambda - rho) t}.
    PhiMinus,
    /// The regular solution of one angular mode (see --mode-p/--mode-q).
    Mode,
}

fn model_name(m: ModelArg) -> &'static str {
    match m {
        ModelArg::Phi => "phi",
        ModelArg::PhiPlus => "phi-plus",
        ModelArg::PhiMinus => "phi-minus",
        ModelArg::Mode => "mode",
    }
}

fn build_model(
    model: ModelArg,
    space: RankOneSpace,
    lambda: SpectralParam,
    mode_p: u32,
    mode_q: u32,
) -> Result<ModelEigenfunction, Failure> {
    let m = match model {
        ModelArg::Phi => ModelEigenfunction::phi(space, lambda)?,
        ModelArg::PhiPlus => ModelEigenfunction::big_phi_plus(space, lambda)?,
        ModelArg::PhiMinus => ModelEigenfunction::big_phi_minus(space, lambda)?,
        ModelArg::Mode => {
            let mode = ModeIndex::new(mode_p, mode_q, &space)?;
            ModelEigenfunction::mode(space, lambda, mode)?
        }
    };
    Ok(m)
}

fn grid_from(min: f64, max: f64, step: f64, what: &str) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0 && step.is_finite() && min.is_finite() && max.is_finite() && min <= max) {
        return Err(Failure::Validation(format!(
            "{what} grid needs finite min <= max and step > 0 (got {min}, {max}, {step})"
        )));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| min + step * k as f64).collect())
}

fn linspace(lo: f64, hi: f64, steps: usize, what: &str) -> Result<Vec<f64>, Failure> {
    if steps < 2 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Failure::Validation(format!(
            "{what} needs finite lo < hi and at least 2 steps (got {lo}, {hi}, {steps})"
        )));
    }
    let d = hi - lo;
    Ok((0..steps)
        .map(|k| lo + d * k as f64 / (steps - 1) as f64)
        .collect())
}

fn spectral(lambda: Complex64) -> Result<SpectralParam, Failure> {
    Ok(SpectralParam::new(lambda)?)
}

// --- space -----------------------------------------------------------------

#[derive(Args, Debug)]
pub struct SpaceArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

pub fn cmd_space(args: &SpaceArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    let sample_ts = [0.5, 1.0, 2.0, 4.0, 8.0];
    let samples: Vec<serde_json::Value> = sample_ts
        .iter()
        .map(|&t| Ok(serde_json::json!({ "t": t, "jacobian": space.jacobian(t)? })))
        .collect::<Result<_, Error>>()?;
    let payload = serde_json::json!({
        "m_gamma": space.m_gamma(),
        "m_2gamma": space.m_2gamma(),
        "rho": space.rho(),
        "dimension": space.dimension(),
        "jacobian_samples": samples,
    });
    let payload_bytes =
        serde_json::to_vec(&payload).map_err(|e| Failure::Numerical(e.to_string()))?;
    let manifest = RunManifest::new(
        "space",
        SpaceDescriptor::new(&space, family),
        BTreeMap::new(),
        &payload_bytes,
    );
    let report = serde_json::json!({ "manifest": manifest, "space": payload });
    // This command's report is its primary output: stdout by default.
    match &args.json {
        Some(_) => emit_report(&report, &args.json),
        None => {
            let mut text = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            text.push('\n');
            print!("{text}");
            Ok(())
        }
    }
}

// --- phi -------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct PhiArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Spectral parameter, e.g. 1, 0.5-0.25i, 1.35i.
    #[arg(long, value_parser = parse_complex_cli, allow_hyphen_values = true)]
    lambda: Complex64,
    /// Evaluation backend.
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    #[arg(long, default_value_t = 1.0)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    t_step: f64,
    #[command(flatten)]
    out: OutputSelect,
}

pub fn cmd_phi(args: &PhiArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    let lambda = spectral(args.lambda)?;
    let want_series = args.method != MethodArg::Ode;
    let want_ode = args.method != MethodArg::Series;
    if want_series && lambda.is_excluded() {
        return Err(Failure::Excluded(format!(
            "the series expansion is undefined on the lattice i*Z (lambda = {})",
            args.lambda
        )));
    }
    let grid = grid_from(args.t_min, args.t_max, args.t_step, "t")?;
    if want_series && grid[0] < 1.0 {
        return Err(Failure::Validation(
            "the series backend needs t >= 1; use --method ode for smaller radii".into(),
        ));
    }

    let sf = SphericalFunctions::new(space);
    let series: Option<Vec<Complex64>> = if want_series {
        Some(
            grid.par_iter()
                .map(|&t| sf.phi_via_series(lambda, t))
                .collect::<Result<_, Error>>()?,
        )
    } else {
        None
    };
    let ode: Option<Vec<Complex64>> =
        if want_ode { Some(sf.phi_via_ode(lambda, &grid)?) } else { None };

    let mut csv = CsvDoc::new("t,re_series,im_series,re_ode,im_ode,rel_diff");
    let mut max_rel: Option<f64> = None;
    for (i, &t) in grid.iter().enumerate() {
        let (mut rs, mut is_, mut ro, mut io_, mut rd) =
            (String::new(), String::new(), String::new(), String::new(), String::new());
        if let Some(s) = &series {
            rs = float_field(s[i].re);
            is_ = float_field(s[i].im);
        }
        if let Some(o) = &ode {
            ro = float_field(o[i].re);
            io_ = float_field(o[i].im);
        }
        if let (Some(s), Some(o)) = (&series, &ode) {
            let d = (s[i] - o[i]).norm() / o[i].norm().max(f64::MIN_POSITIVE);
            rd = float_field(d);
            max_rel = Some(max_rel.map_or(d, |m: f64| m.max(d)));
        }
        csv.row(&[float_field(t), rs, is_, ro, io_, rd]);
    }

    let mut params = BTreeMap::new();
    params.insert("lambda".into(), complex_json(args.lambda));
    params.insert(
        "method".into(),
        serde_json::json!(match args.method {
            MethodArg::Series => "series",
            MethodArg::Ode => "ode",
            MethodArg::Both => "both",
        }),
    );
    params.insert("t_min".into(), serde_json::json!(args.t_min));
    params.insert("t_max".into(), serde_json::json!(args.t_max));
    params.insert("t_step".into(), serde_json::json!(args.t_step));
    let opts = OdeOptions::default();
    params.insert("ode_rtol".into(), serde_json::json!(opts.rtol));
    params.insert("ode_atol".into(), serde_json::json!(opts.atol));
    let manifest = RunManifest::new(
        "phi",
        SpaceDescriptor::new(&space, family),
        params,
        csv.bytes(),
    );
    let report = serde_json::json!({
        "manifest": manifest,
        "rows": grid.len(),
        "max_rel_diff": max_rel,
    });
    emit(&csv, &args.out.csv, &report, &args.out.json)
}

// --- annulus ---------------------------------------------------------------

#[derive(Args, Debug)]
pub struct AnnulusArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Spectral parameter of the model eigenfunction.
    #[arg(long, value_parser = parse_complex_cli, allow_hyphen_values = true)]
    lambda: Complex64,
    /// Lebesgue exponent of the annulus mass.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Model eigenfunction to classify.
    #[arg(long, value_enum, default_value_t = ModelArg::Phi)]
    model: ModelArg,
    /// Angular indices for --model mode.
    #[arg(long, default_value_t = 0)]
    mode_p: u32,
    #[arg(long, default_value_t = 0)]
    mode_q: u32,
    #[arg(long, default_value_t = 4.0)]
    r_min: f64,
    #[arg(long, default_value_t = 12.0)]
    r_max: f64,
    #[arg(long, default_value_t = 1.0)]
    r_step: f64,
    /// Exit with code 4 if the measured class is indeterminate.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: OutputSelect,
}

pub fn cmd_annulus(args: &AnnulusArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    let lambda = spectral(args.lambda)?;
    let radii = grid_from(args.r_min, args.r_max, args.r_step, "R")?;
    let model = build_model(args.model, space, lambda, args.mode_p, args.mode_q)?;
    let report_data = classify(&model, args.p, &radii)?;

    let mut csv = CsvDoc::new("R,log_mass");
    for &(r, ref m) in &report_data.masses {
        csv.row(&[float_field(r), float_field(m.ln())]);
    }

    let mut params = BTreeMap::new();
    params.insert("lambda".into(), complex_json(args.lambda));
    params.insert("p".into(), serde_json::json!(args.p));
    params.insert("model".into(), serde_json::json!(model_name(args.model)));
    if args.model == ModelArg::Mode {
        params.insert("mode_p".into(), serde_json::json!(args.mode_p));
        params.insert("mode_q".into(), serde_json::json!(args.mode_q));
    }
    params.insert("r_min".into(), serde_json::json!(args.r_min));
    params.insert("r_max".into(), serde_json::json!(args.r_max));
    params.insert("r_step".into(), serde_json::json!(args.r_step));
    params.insert("mass_rel_tol".into(), serde_json::json!(MASS_REL_TOL));
    params.insert("strict".into(), serde_json::json!(args.strict));
    let manifest = RunManifest::new(
        "annulus",
        SpaceDescriptor::new(&space, family),
        params,
        csv.bytes(),
    );
    let envelope = report_data.envelope.as_ref().map(|e| {
        serde_json::json!({ "lower": e.lower, "upper": e.upper, "period": e.period })
    });
    let report = serde_json::json!({
        "manifest": manifest,
        "fitted_rate": report_data.fitted_rate,
        "fit_rms": report_data.fit_rms,
        "predicted_rate": report_data.predicted_rate,
        "predicted_class": report_data.predicted_class.to_string(),
        "measured_class": report_data.measured_class.to_string(),
        "envelope": envelope,
    });
    emit(&csv, &args.out.csv, &report, &args.out.json)?;

    if args.strict && report_data.measured_class == GrowthClass::Indeterminate {
        return Err(Failure::Strict(
            "measured growth class is indeterminate (strict mode)".into(),
        ));
    }
    Ok(())
}

// --- spectrum --------------------------------------------------------------

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Lebesgue exponent of the region.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, default_value_t = 6.0)]
    re_max: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    im_min: f64,
    #[arg(long, default_value_t = 2.0)]
    im_max: f64,
    #[arg(long, default_value_t = 81)]
    re_steps: usize,
    #[arg(long, default_value_t = 41)]
    im_steps: usize,
    /// Evaluate these points instead of the grid (repeatable).
    #[arg(long, value_parser = parse_complex_cli, allow_hyphen_values = true)]
    point: Vec<Complex64>,
    #[command(flatten)]
    out: OutputSelect,
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    if !(args.p >= 1.0) {
        return Err(Failure::Validation(format!(
            "the exponent must satisfy p >= 1, got {}",
            args.p
        )));
    }
    let points: Vec<Complex64> = if args.point.is_empty() {
        let res = linspace(args.re_min, args.re_max, args.re_steps, "Re w grid")?;
        let ims = linspace(args.im_min, args.im_max, args.im_steps, "Im w grid")?;
        ims.iter()
            .flat_map(|&im| res.iter().map(move |&re| Complex64::new(re, im)))
            .collect()
    } else {
        args.point.clone()
    };

    let inside: Vec<bool> = points
        .par_iter()
        .map(|&w| lp_spectrum_contains(&space, args.p, w))
        .collect::<Result<_, Error>>()?;

    let mut csv = CsvDoc::new("re_w,im_w,inside");
    let mut count = 0usize;
    for (w, &is_in) in points.iter().zip(&inside) {
        csv.row(&[
            float_field(w.re),
            float_field(w.im),
            if is_in { "1".into() } else { "0".into() },
        ]);
        count += usize::from(is_in);
    }

    let mut params = BTreeMap::new();
    params.insert("p".into(), serde_json::json!(args.p));
    params.insert("gamma_p".into(), serde_json::json!(gamma_p(args.p)?));
    if args.point.is_empty() {
        params.insert("re_min".into(), serde_json::json!(args.re_min));
        params.insert("re_max".into(), serde_json::json!(args.re_max));
        params.insert("im_min".into(), serde_json::json!(args.im_min));
        params.insert("im_max".into(), serde_json::json!(args.im_max));
        params.insert("re_steps".into(), serde_json::json!(args.re_steps));
        params.insert("im_steps".into(), serde_json::json!(args.im_steps));
    } else {
        let list: Vec<serde_json::Value> =
            args.point.iter().map(|&z| complex_json(z)).collect();
        params.insert("points".into(), serde_json::Value::Array(list));
    }
    let manifest = RunManifest::new(
        "spectrum",
        SpaceDescriptor::new(&space, family),
        params,
        csv.bytes(),
    );
    let report = serde_json::json!({
        "manifest": manifest,
        "rows": points.len(),
        "inside_count": count,
    });
    emit(&csv, &args.out.csv, &report, &args.out.json)
}

// --- hardy -----------------------------------------------------------------

#[derive(Args, Debug)]
pub struct HardyArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Spectral parameter of the model eigenfunction.
    #[arg(long, value_parser = parse_complex_cli, allow_hyphen_values = true)]
    lambda: Complex64,
    /// Lebesgue exponent of the sphere means.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Radial weight exponent (0 probes the sharp threshold).
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Model eigenfunction to test.
    #[arg(long, value_enum, default_value_t = ModelArg::PhiPlus)]
    model: ModelArg,
    /// Angular indices for --model mode.
    #[arg(long, default_value_t = 0)]
    mode_p: u32,
    #[arg(long, default_value_t = 0)]
    mode_q: u32,
    #[arg(long, default_value_t = 1.0)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    t_step: f64,
    #[command(flatten)]
    out: OutputSelect,
}

pub fn cmd_hardy(args: &HardyArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    let lambda = spectral(args.lambda)?;
    let grid = grid_from(args.t_min, args.t_max, args.t_step, "t")?;
    let model = build_model(args.model, space, lambda, args.mode_p, args.mode_q)?;
    let result = hardy_functional(&model, args.p, args.eps, &grid)?;

    // Plot-ready trace of the weighted values, in log form.
    let decay = lambda.value().im.abs() + space.rho();
    let mut csv = CsvDoc::new("t,log_weighted");
    for &t in &grid {
        let v = model.evaluate(t)?.norm();
        csv.row(&[float_field(t), float_field(args.eps * t.ln() + v.ln() + decay * t)]);
    }

    let mut params = BTreeMap::new();
    params.insert("lambda".into(), complex_json(args.lambda));
    params.insert("p".into(), serde_json::json!(args.p));
    params.insert("eps".into(), serde_json::json!(args.eps));
    params.insert("model".into(), serde_json::json!(model_name(args.model)));
    if args.model == ModelArg::Mode {
        params.insert("mode_p".into(), serde_json::json!(args.mode_p));
        params.insert("mode_q".into(), serde_json::json!(args.mode_q));
    }
    params.insert("t_min".into(), serde_json::json!(args.t_min));
    params.insert("t_max".into(), serde_json::json!(args.t_max));
    params.insert("t_step".into(), serde_json::json!(args.t_step));
    let manifest = RunManifest::new(
        "hardy",
        SpaceDescriptor::new(&space, family),
        params,
        csv.bytes(),
    );
    let report = serde_json::json!({
        "manifest": manifest,
        "sup_value": result.sup_value,
        "log_sup": result.log_sup,
        "log_sup_half": result.log_sup_half,
        "divergence_flag": result.divergence_flag,
    });
    emit(&csv, &args.out.csv, &report, &args.out.json)
}

// --- mode ------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct ModeArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Spectral parameter of the radial equation.
    #[arg(long, value_parser = parse_complex_cli, allow_hyphen_values = true)]
    lambda: Complex64,
    /// Angular indices of the mode.
    #[arg(long, default_value_t = 0)]
    mode_p: u32,
    #[arg(long, default_value_t = 0)]
    mode_q: u32,
    #[arg(long, default_value_t = 1.0)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    t_step: f64,
    #[command(flatten)]
    out: OutputSelect,
}

pub fn cmd_mode(args: &ModeArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    let lambda = spectral(args.lambda)?;
    let mode = ModeIndex::new(args.mode_p, args.mode_q, &space)?;
    let grid = grid_from(args.t_min, args.t_max, args.t_step, "t")?;
    let opts = OdeOptions::default();
    let forward = solve_forward(&space, lambda, mode, &grid, &opts)?;
    let (plus, minus) = frame_solutions(&space, lambda, mode, &grid, &opts)?;
    let (ta, tb, tc) = choose_probes(&plus, &minus)?;
    let cc = connection_coefficients(&forward, &plus, &minus, ta, tb, tc)?;

    let mut csv = CsvDoc::new("t,re_u,im_u,re_du,im_du");
    for &t in &grid {
        let (u, du) = forward
            .value_at(t)
            .ok_or_else(|| Failure::Numerical(format!("missing sample at t = {t}")))?;
        csv.row(&[
            float_field(t),
            float_field(u.re),
            float_field(u.im),
            float_field(du.re),
            float_field(du.im),
        ]);
    }

    let mut params = BTreeMap::new();
    params.insert("lambda".into(), complex_json(args.lambda));
    params.insert("mode_p".into(), serde_json::json!(args.mode_p));
    params.insert("mode_q".into(), serde_json::json!(args.mode_q));
    params.insert("t_min".into(), serde_json::json!(args.t_min));
    params.insert("t_max".into(), serde_json::json!(args.t_max));
    params.insert("t_step".into(), serde_json::json!(args.t_step));
    params.insert("probes".into(), serde_json::json!([ta, tb, tc]));
    params.insert("ode_rtol".into(), serde_json::json!(opts.rtol));
    params.insert("ode_atol".into(), serde_json::json!(opts.atol));
    let manifest = RunManifest::new(
        "mode",
        SpaceDescriptor::new(&space, family),
        params,
        csv.bytes(),
    );
    let report = serde_json::json!({
        "manifest": manifest,
        "c1": complex_json(cc.c1),
        "c2": complex_json(cc.c2),
        "conditioning": cc.conditioning,
        "cross_defect": cc.cross_defect,
        "residual_forward": forward.residual_sup(),
        "residual_plus": plus.residual_sup(),
        "residual_minus": minus.residual_sup(),
    });
    emit(&csv, &args.out.csv, &report, &args.out.json)
}

// --- cfun ------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct CfunArgs {
    #[command(flatten)]
    space: SpaceSelect,
    /// Single spectral parameter (otherwise a Re-grid at fixed Im is used).
    #[arg(long, value_parser = parse_complex_cli, allow_hyphen_values = true)]
    lambda: Option<Complex64>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, default_value_t = 2.0)]
    re_max: f64,
    #[arg(long, default_value_t = 7)]
    re_steps: usize,
    /// Fixed imaginary part of the grid parameters.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    im: f64,
    #[command(flatten)]
    out: OutputSelect,
}

pub fn cmd_cfun(args: &CfunArgs) -> Result<(), Failure> {
    let (space, family) = args.space.resolve()?;
    let lambdas: Vec<Complex64> = match args.lambda {
        Some(l) => vec![l],
        None => linspace(args.re_min, args.re_max, args.re_steps, "Re lambda grid")?
            .into_iter()
            .map(|re| Complex64::new(re, args.im))
            .collect(),
    };
    let sf = SphericalFunctions::new(space);
    let values: Vec<Complex64> = lambdas
        .iter()
        .map(|&l| sf.c_function(SpectralParam::new(l)?))
        .collect::<Result<_, Error>>()?;

    let mut csv = CsvDoc::new("re_lambda,im_lambda,re_c,im_c");
    for (l, c) in lambdas.iter().zip(&values) {
        csv.row(&[
            float_field(l.re),
            float_field(l.im),
            float_field(c.re),
            float_field(c.im),
        ]);
    }

    let mut params = BTreeMap::new();
    match args.lambda {
        Some(l) => {
            params.insert("lambda".into(), complex_json(l));
        }
        None => {
            params.insert("re_min".into(), serde_json::json!(args.re_min));
            params.insert("re_max".into(), serde_json::json!(args.re_max));
            params.insert("re_steps".into(), serde_json::json!(args.re_steps));
            params.insert("im".into(), serde_json::json!(args.im));
        }
    }
    let manifest = RunManifest::new(
        "cfun",
        SpaceDescriptor::new(&space, family),
        params,
        csv.bytes(),
    );
    let report = serde_json::json!({
        "manifest": manifest,
        "rows": lambdas.len(),
    });
    emit(&csv, &args.out.csv, &report, &args.out.json)
}
