//! Run configuration: defaults, an optional JSON config file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Lambda_k by curvature and normal Morse indices.
    Measure,
    /// Polar lengths L_q over random planes.
    Polar,
    /// Lambda_q against L_q.
    Verify,
    /// Local identities of a conical germ.
    Local,
    /// Slice integrals of chi against Lambda_{n-k}.
    Kinematic,
    /// Lists the shape and germ catalogs.
    Catalog,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Measure => "measure",
            Command::Polar => "polar",
            Command::Verify => "verify",
            Command::Local => "local",
            Command::Kinematic => "kinematic",
            Command::Catalog => "catalog",
        };
        f.write_str(s)
    }
}

/// Everything a run depends on. The echo in the report reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Command,
    pub shape: Option<String>,
    pub germ: Option<String>,
    /// `k` or `q` values; empty means all meaningful values.
    pub ks: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    pub alpha_mode: String,
    /// Pass threshold in combined standard errors.
    pub tolerance: f64,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Catalog,
            shape: None,
            germ: None,
            ks: Vec::new(),
            samples: 2000,
            seed: 1,
            threads: None,
            alpha_mode: "closed-form".into(),
            tolerance: 3.0,
            report: None,
            csv: None,
            plot: None,
        }
    }
}

/// Parses `0,1,2`.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| usize::from_str(t).map_err(|_| CliError::Usage(format!("bad index `{t}` in `{s}`"))))
        .collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let needs_shape = matches!(self.command, Command::Measure | Command::Polar | Command::Verify | Command::Kinematic);
        if needs_shape && self.shape.is_none() {
            return Err(CliError::Usage(format!("`{}` needs --shape", self.command)));
        }
        if self.command == Command::Local && self.germ.is_none() {
            return Err(CliError::Usage("`local` needs --germ".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Usage("--samples must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(CliError::Usage("--tolerance must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        stratlk::polar::AlphaMode::from_str(&self.alpha_mode).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }
}
