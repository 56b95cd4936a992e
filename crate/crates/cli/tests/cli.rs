//! End-to-end tests driving the compiled `rankone` binary.
//!
//! Everything here goes through `std::process::Command`: exit codes, CSV
//! shape, the JSON report on stderr, environment handling, and the
//! cross-command consistency promises (mode vs cfun, p vs its dual).

use sha2::{Digest, Sha256};
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rankone"));
    cmd.args(args);
    // Hermetic by default: the suite's own environment must not leak in.
    cmd.env_remove("RANKONE_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("failed to spawn the binary");
    Run {
        code: out.status.code().expect("killed by signal"),
        stdout: String::from_utf8(out.stdout).expect("stdout is not UTF-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is not UTF-8"),
    }
}

fn run(args: &[&str]) -> Run {
    run_with_env(args, &[])
}

/// Parse the JSON report (a success run's stderr is exactly the report).
fn report(run: &Run) -> serde_json::Value {
    serde_json::from_str(&run.stderr).expect("stderr is not a JSON report")
}

/// Parse the report from a run that also printed an `error:` line after it.
fn report_before_error(run: &Run) -> serde_json::Value {
    let body: String = run
        .stderr
        .lines()
        .filter(|l| !l.starts_with("error:"))
        .collect::<Vec<_>>()
        .join("\n");
    serde_json::from_str(&body).expect("stderr does not start with a JSON report")
}

fn csv_rows(stdout: &str) -> Vec<Vec<String>> {
    stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn f(field: &str) -> f64 {
    field.parse().unwrap_or_else(|_| panic!("not a float: `{field}`"))
}

// --- space -----------------------------------------------------------------

#[test]
fn space_defaults_to_real_three() {
    let r = run(&["space"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["space"]["rho"], 1.0);
    assert_eq!(doc["space"]["dimension"], 3);
    assert_eq!(doc["space"]["m_gamma"], 2);
    assert_eq!(doc["space"]["m_2gamma"], 0);
    assert_eq!(doc["manifest"]["command"], "space");
    assert_eq!(doc["manifest"]["space"]["family"], "real:3");
}

#[test]
fn space_accepts_explicit_multiplicities() {
    let r = run(&["space", "--mg", "2", "--m2g", "1"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["space"]["rho"], 2.0);
    assert_eq!(doc["space"]["dimension"], 4);
    assert!(doc["manifest"]["space"]["family"].is_null());
}

#[test]
fn space_rejects_zero_short_multiplicity() {
    let r = run(&["space", "--mg", "0", "--m2g", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("error:"), "stderr: {}", r.stderr);
}

#[test]
fn space_rejects_unknown_family() {
    let r = run(&["space", "--family", "sedenion:2"]);
    assert_eq!(r.code, 2);
}

// --- phi -------------------------------------------------------------------

#[test]
fn phi_backends_agree_on_default_grid() {
    let r = run(&["phi", "--lambda", "1"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert_eq!(
        r.stdout.lines().next().unwrap(),
        "t,re_series,im_series,re_ode,im_ode,rel_diff"
    );
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 37); // t = 1, 1.25, ..., 10
    for row in &rows {
        assert_eq!(row.len(), 6);
        assert!(f(&row[5]) <= 1e-8, "rel_diff too large at t = {}", row[0]);
    }
    let rep = report(&r);
    assert!(rep["max_rel_diff"].as_f64().unwrap() <= 1e-8);
    assert_eq!(rep["rows"], 37);
}

#[test]
fn phi_series_rejects_excluded_parameter() {
    let r = run(&["phi", "--lambda", "2i", "--method", "series"]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.is_empty());
}

#[test]
fn phi_ode_handles_the_excluded_point() {
    let r = run(&["phi", "--lambda", "0", "--method", "ode"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rows = csv_rows(&r.stdout);
    let last = rows.last().unwrap();
    assert_eq!(f(&last[0]), 10.0);
    // Series columns stay empty when only the ODE backend runs.
    assert!(last[1].is_empty() && last[2].is_empty() && last[5].is_empty());
    // On the three-dimensional real space phi_0(t) = t / sinh t, so the
    // value at t = 10 sits near 20 e^{-10}.
    let v = f(&last[3]);
    let e10 = (-10.0f64).exp();
    assert!(v > 0.5 * e10 && v < 22.0 * e10, "phi_0(10) = {v}");
}

#[test]
fn phi_series_rejects_radii_below_one() {
    let r = run(&["phi", "--lambda", "1", "--t-min", "0.5"]);
    assert_eq!(r.code, 2);
}

#[test]
fn phi_rejects_malformed_lambda() {
    let r = run(&["phi", "--lambda", "1+2j"]);
    assert_eq!(r.code, 2);
}

// --- output plumbing -------------------------------------------------------

#[test]
fn runs_are_deterministic() {
    let a = run(&["phi", "--lambda", "0.5-0.25i", "--family", "complex:2"]);
    let b = run(&["phi", "--lambda", "0.5-0.25i", "--family", "complex:2"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn manifest_checksum_covers_the_csv() {
    let r = run(&["phi", "--lambda", "1.35i", "--family", "quat:2"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rep = report(&r);
    let expect = format!("{:x}", Sha256::digest(r.stdout.as_bytes()));
    assert_eq!(rep["manifest"]["output_checksum"], expect.as_str());
    assert_eq!(rep["manifest"]["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn csv_flag_redirects_stdout_to_a_file() {
    let inline = run(&["cfun", "--lambda", "1-1i"]);
    assert_eq!(inline.code, 0);
    let path = std::env::temp_dir().join(format!("rankone-cli-test-{}.csv", std::process::id()));
    let path_str = path.to_str().unwrap();
    let filed = run(&["cfun", "--lambda", "1-1i", "--csv", path_str]);
    assert_eq!(filed.code, 0);
    assert!(filed.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, inline.stdout);
}

#[test]
fn worker_count_does_not_change_the_bytes() {
    let serial = run_with_env(&["phi", "--lambda", "2"], &[("RANKONE_WORKERS", "1")]);
    let pooled = run_with_env(&["phi", "--lambda", "2"], &[("RANKONE_WORKERS", "3")]);
    assert_eq!(serial.code, 0);
    assert_eq!(serial.stdout, pooled.stdout);
    assert_eq!(serial.stderr, pooled.stderr);
}

#[test]
fn worker_count_must_be_a_positive_integer() {
    for bad in ["abc", "0", "-2"] {
        let r = run_with_env(&["space"], &[("RANKONE_WORKERS", bad)]);
        assert_eq!(r.code, 2, "RANKONE_WORKERS={bad}");
    }
}

// --- annulus ---------------------------------------------------------------

#[test]
fn annulus_detects_exponential_decay() {
    let r = run(&[
        "annulus", "--model", "phi-plus", "--lambda", "0.5+2i", "--p", "1",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rep = report(&r);
    assert_eq!(rep["measured_class"], "exponential-decay");
    assert_eq!(rep["predicted_class"], "exponential-decay");
}

#[test]
fn annulus_fitted_rate_matches_theory() {
    let r = run(&[
        "annulus", "--model", "phi-plus", "--lambda", "0.5i", "--p", "1",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rep = report(&r);
    let rate = rep["fitted_rate"].as_f64().unwrap();
    // p = 1 on real:3 gives gamma_p rho = 1; Im lambda = 0.5 leaves
    // growth at rate p (gamma_p rho - Im lambda) = 0.5.
    assert!((rate - 0.5).abs() <= 0.05, "fitted_rate = {rate}");
    assert_eq!(rep["measured_class"], "exponential-growth");
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 9); // R = 4, 5, ..., 12
    assert_eq!(r.stdout.lines().next().unwrap(), "R,log_mass");
}

#[test]
fn annulus_sees_linear_growth_on_the_critical_line() {
    let r = run(&["annulus", "--lambda", "1", "--p", "2"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rep = report(&r);
    assert_eq!(rep["measured_class"], "linear");
    assert_eq!(rep["predicted_class"], "linear");
}

#[test]
fn annulus_strict_mode_fails_on_indeterminate() {
    // Real parameter, p = 1: the mass oscillates, so no class is measured.
    let r = run(&["annulus", "--lambda", "1", "--p", "1", "--strict"]);
    assert_eq!(r.code, 4);
    // The CSV and report are still emitted before the failure.
    assert_eq!(r.stdout.lines().next().unwrap(), "R,log_mass");
    let rep = report_before_error(&r);
    assert_eq!(rep["measured_class"], "indeterminate");
    assert!(rep["envelope"]["upper"].as_f64().unwrap() > 0.0);
    assert!(rep["envelope"]["period"].as_f64().unwrap() > 0.0);
}

// --- spectrum --------------------------------------------------------------

#[test]
fn spectrum_grid_marks_the_half_line_for_p_two() {
    let r = run(&["spectrum", "--p", "2"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert_eq!(r.stdout.lines().next().unwrap(), "re_w,im_w,inside");
    let mut inside_count = 0usize;
    for row in csv_rows(&r.stdout) {
        let (re, im, inside) = (f(&row[0]), f(&row[1]), &row[2]);
        assert!(inside == "0" || inside == "1");
        if inside == "1" {
            inside_count += 1;
        }
        // Away from the boundary point w = rho^2 = 1 the L^2 region on
        // this grid is exactly the half-line [1, 6] x {0}.
        if (re - 1.0).abs() > 1e-6 {
            let expect = im == 0.0 && re > 1.0;
            assert_eq!(inside == "1", expect, "w = {re} + {im}i");
        }
    }
    assert_eq!(inside_count, 51); // re in {1.0, 1.1, ..., 6.0}
}

#[test]
fn spectrum_contains_zero_for_p_one() {
    let r = run(&["spectrum", "--p", "1", "--point", "0"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "1");
}

#[test]
fn spectrum_agrees_with_the_dual_exponent() {
    let four = run(&["spectrum", "--p", "4"]);
    let dual = run(&["spectrum", "--p", "1.3333333333333333"]);
    assert_eq!(four.code, 0);
    assert_eq!(dual.code, 0);
    // gamma_p only enters through |gamma_p|, so p and p/(p-1) give the
    // same region — byte for byte on the default grid.
    assert_eq!(four.stdout, dual.stdout);
}

#[test]
fn spectrum_rejects_exponents_below_one() {
    let r = run(&["spectrum", "--p", "0.5"]);
    assert_eq!(r.code, 2);
}

// --- cfun and mode ---------------------------------------------------------

#[test]
fn cfun_modulus_identity_on_the_default_grid() {
    // On real:3 the expansion weight is c(lambda) = 1 / (i lambda), so
    // |c(lambda)| |lambda| must be constant along the grid.
    let r = run(&["cfun"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 7);
    let products: Vec<f64> = rows
        .iter()
        .map(|row| {
            let l = f(&row[0]).hypot(f(&row[1]));
            let c = f(&row[2]).hypot(f(&row[3]));
            c * l
        })
        .collect();
    for &p in &products {
        assert!((p / products[0] - 1.0).abs() <= 1e-6, "products: {products:?}");
    }
}

#[test]
fn mode_connection_matches_the_expansion_weights() {
    let lam = "0.9-0.8i";
    let neg = "-0.9+0.8i";
    let m = run(&["mode", "--lambda", lam]);
    assert_eq!(m.code, 0, "stderr: {}", m.stderr);
    let rep = report(&m);
    let c = |v: &serde_json::Value| {
        num_complex::Complex64::new(v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
    };
    let (c1, c2) = (c(&rep["c1"]), c(&rep["c2"]));

    let cfun_at = |arg: &str| {
        let r = run(&["cfun", "--lambda", arg]);
        assert_eq!(r.code, 0, "stderr: {}", r.stderr);
        let row = &csv_rows(&r.stdout)[0];
        num_complex::Complex64::new(f(&row[2]), f(&row[3]))
    };
    let (w1, w2) = (cfun_at(lam), cfun_at(neg));
    assert!((c1 - w1).norm() / w1.norm() <= 1e-6, "c1 = {c1}, c({lam}) = {w1}");
    assert!((c2 - w2).norm() / w2.norm() <= 1e-6, "c2 = {c2}, c({neg}) = {w2}");
    assert!(rep["residual_forward"].as_f64().unwrap() <= 1e-5);
    assert!(rep["residual_plus"].as_f64().unwrap() <= 1e-5);
    assert!(rep["residual_minus"].as_f64().unwrap() <= 1e-5);
}

// --- hardy -----------------------------------------------------------------

#[test]
fn hardy_threshold_weight_stays_bounded() {
    let r = run(&["hardy", "--model", "phi-plus", "--lambda", "1+0.5i", "--eps", "0"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rep = report(&r);
    assert_eq!(rep["divergence_flag"], false);
    let rows = csv_rows(&r.stdout);
    assert_eq!(r.stdout.lines().next().unwrap(), "t,log_weighted");
    assert_eq!(rows.len(), 37);
}

#[test]
fn hardy_positive_eps_diverges() {
    let r = run(&["hardy", "--model", "phi-plus", "--lambda", "1+0.5i", "--eps", "0.1"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let rep = report(&r);
    assert_eq!(rep["divergence_flag"], true);
}
