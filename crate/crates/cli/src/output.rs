//! CSV schemas and the run manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

pub const SPECTRUM_COLUMNS: &[&str] = &["hbar_inverse", "n", "parity", "energy"];
pub const DOUBLET_COLUMNS: &[&str] = &["hbar_inverse", "n", "e_plus", "e_minus", "splitting", "flags"];
pub const TRACE_GRID_COLUMNS: &[&str] =
    &["hbar_inverse", "re_t", "im_t", "re_delta0", "im_delta0", "contamination", "status"];
pub const SCAN_COLUMNS: &[&str] = &["hbar_inverse", "n", "method", "value", "ln_value", "ln_ratio", "lambda", "energy", "status", "warnings"];
/// Same as the trajectory dump of the core crate.
pub const ORBIT_COLUMNS: &[&str] = &["s", "re_q", "im_q", "re_p", "im_p", "re_t", "im_t"];

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub outputs: Vec<OutputFile>,
    pub metrics: serde_json::Value,
    pub warnings: Vec<String>,
}

/// Conventions fixed by the implementation that a rerun depends on.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub hamiltonian: &'static str,
    pub time_path: &'static str,
    pub splitting: &'static str,
    pub resonance_match: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            hamiltonian: "H = p^2/2 + V(q), unit mass",
            time_path: "staircase of real and -i steps, Im t non-increasing",
            splitting: "|E_odd - E_even| of the doublet, positive",
            resonance_match: "tau = 0, lattice tolerance T_r/20",
        }
    }
}

pub fn schema_name(command: &str) -> String {
    format!("semitunnel-{command}-v{SCHEMA_VERSION}")
}

/// Writes `rows` under `columns` to `dir/file`.
pub fn write_csv(dir: &Path, file: &str, command: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<OutputFile, CliError> {
    let path = dir.join(file);
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path).map_err(|e| io(&path, e))?));
    w.write_record(columns).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| io(&path, e))?;
    Ok(OutputFile {
        file: file.to_string(),
        schema: schema_name(command),
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows: rows.len(),
    })
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| io(&path, e))
}

pub fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:e}")
    }
}
