//! Result artifacts: one JSON document per run plus plot-ready CSV series.
//! All writes go through a temp-file rename so readers never observe a
//! partial file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::spec::RunSpec;
use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The result document. `series` holds the per-step (or per-grid-point)
/// arrays, `scalars` the single numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub tool_version: String,
    pub algorithm: String,
    pub config: RunSpec,
    pub series: BTreeMap<String, Vec<f64>>,
    pub scalars: BTreeMap<String, f64>,
    pub wall_time_s: f64,
    pub seed: u64,
}

impl ResultFile {
    pub fn new(algorithm: &str, config: &RunSpec, seed: u64) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            algorithm: algorithm.to_string(),
            config: config.clone(),
            series: BTreeMap::new(),
            scalars: BTreeMap::new(),
            wall_time_s: 0.0,
            seed,
        }
    }
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp: PathBuf = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_result_json(dir: &Path, result: &ResultFile) -> Result<PathBuf, CliError> {
    let path = dir.join("result.json");
    let mut body = serde_json::to_string_pretty(result)
        .map_err(|e| CliError::Io(format!("cannot serialize result: {e}")))?;
    body.push('\n');
    atomic_write(&path, body.as_bytes())?;
    Ok(path)
}

/// One `step,value` series.
pub fn write_series_csv(dir: &Path, name: &str, values: &[f64]) -> Result<(), CliError> {
    let mut body = String::from("step,value\n");
    for (i, v) in values.iter().enumerate() {
        body.push_str(&format!("{i},{v}\n"));
    }
    atomic_write(&dir.join(format!("{name}.csv")), body.as_bytes())
}

/// Arbitrary-column CSV.
pub fn write_table_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<(), CliError> {
    let mut body = String::from(header);
    body.push('\n');
    for row in rows {
        body.push_str(&row);
        body.push('\n');
    }
    atomic_write(&dir.join(format!("{name}.csv")), body.as_bytes())
}

/// Machine-readable error document for failed runs.
pub fn error_json(err: &CliError) -> String {
    serde_json::json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
        }
    })
    .to_string()
}
