//! Reproducible run manifests and deterministic output assembly.
//!
//! Every command emits a primary payload (CSV rows, or a JSON data object
//! for `space`) plus a JSON report embedding a [`RunManifest`]. The
//! manifest records the command, the space, the full parameter map, the
//! tool version, and a SHA-256 checksum of the payload bytes, so a rerun
//! of the same manifest on the same build is byte-identical and verifiable.

use rankone::RankOneSpace;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use crate::commands::Failure;

#[derive(Serialize, Clone)]
pub struct SpaceDescriptor {
    pub family: Option<String>,
    pub m_gamma: u32,
    pub m_2gamma: u32,
    pub rho: f64,
    pub dimension: u32,
}

impl SpaceDescriptor {
    pub fn new(space: &RankOneSpace, family: Option<String>) -> Self {
        Self {
            family,
            m_gamma: space.m_gamma(),
            m_2gamma: space.m_2gamma(),
            rho: space.rho(),
            dimension: space.dimension(),
        }
    }
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub space: SpaceDescriptor,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
    pub output_checksum: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        space: SpaceDescriptor,
        parameters: BTreeMap<String, serde_json::Value>,
        payload: &[u8],
    ) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(payload);
        Self {
            command: command.to_string(),
            space,
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            output_checksum: format!("{:x}", hasher.finalize()),
        }
    }
}

/// Fixed float format for CSV fields: 17 significant digits, e-notation.
pub fn float_field(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex_json(z: num_complex::Complex64) -> serde_json::Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

/// CSV accumulator with a mandatory header, `,` separators, and `\n` line
/// endings.
pub struct CsvDoc {
    bytes: Vec<u8>,
    columns: usize,
}

impl CsvDoc {
    pub fn new(header: &str) -> Self {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(header.as_bytes());
        bytes.push(b'\n');
        Self { bytes, columns: header.split(',').count() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "row width must match the header");
        self.bytes.extend_from_slice(fields.join(",").as_bytes());
        self.bytes.push(b'\n');
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

/// Write the CSV payload (stdout by default) and the JSON report (stderr
/// by default), honoring `--csv` / `--json` path overrides.
pub fn emit(
    csv: &CsvDoc,
    csv_path: &Option<PathBuf>,
    report: &serde_json::Value,
    json_path: &Option<PathBuf>,
) -> Result<(), Failure> {
    let io_fail = |what: &str, e: std::io::Error| Failure::Numerical(format!("{what}: {e}"));
    match csv_path {
        Some(p) => std::fs::write(p, csv.bytes()).map_err(|e| io_fail("writing CSV", e))?,
        None => std::io::stdout()
            .write_all(csv.bytes())
            .map_err(|e| io_fail("writing CSV", e))?,
    }
    emit_report(report, json_path)
}

/// Write just the JSON report (stderr by default).
pub fn emit_report(
    report: &serde_json::Value,
    json_path: &Option<PathBuf>,
) -> Result<(), Failure> {
    let io_fail = |what: &str, e: std::io::Error| Failure::Numerical(format!("{what}: {e}"));
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::Numerical(format!("serializing report: {e}")))?;
    text.push('\n');
    match json_path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_fail("writing report", e))?,
        None => std::io::stderr()
            .write_all(text.as_bytes())
            .map_err(|e| io_fail("writing report", e))?,
    }
    Ok(())
}
