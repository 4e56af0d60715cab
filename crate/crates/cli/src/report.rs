//! Verification reports, their JSON form and the plot CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stratlk::Estimate;

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA: u32 = 1;

/// One side of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl Side {
    pub fn new(name: impl Into<String>, e: &Estimate) -> Self {
        Self { name: name.into(), value: e.value, std_error: e.std_error, n_samples: e.n_samples }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.std_error, self.n_samples, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub quantity: String,
    pub k: usize,
    pub sides: Vec<Side>,
    pub reference: Option<f64>,
    pub pass: bool,
    /// Rejected (non-generic) samples that were redrawn.
    pub resampled: usize,
    pub wall_seconds: f64,
    /// Extra detail, e.g. the estimation method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub config: RunConfig,
    pub rows: Vec<Row>,
    pub pass: bool,
    pub wall_seconds: f64,
}

impl VerificationReport {
    pub fn new(config: RunConfig, rows: Vec<Row>, wall_seconds: f64) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self { schema: SCHEMA, config, rows, pass, wall_seconds }
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Column order of the plot CSV.
pub const PLOT_COLUMNS: [&str; 5] = ["quantity", "k", "value", "se", "reference"];

/// Writes one line per side of every row: `quantity,k,value,se,reference`.
/// `quantity` is the side name; `reference` is empty when unknown.
pub fn emit_plot_data(report: &VerificationReport, path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(PLOT_COLUMNS).map_err(io)?;
    for row in &report.rows {
        for s in &row.sides {
            let reference = row.reference.map(|r| r.to_string()).unwrap_or_default();
            w.write_record([s.name.clone(), row.k.to_string(), s.value.to_string(), s.std_error.to_string(), reference])
                .map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
