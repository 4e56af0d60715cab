//! Command-line verification runs: configuration, execution and reports.

pub mod config;
pub mod reference;
pub mod report;
pub mod run;

pub use config::{parse_list, Command, RunConfig};
pub use report::{emit_plot_data, Row, Side, VerificationReport, SCHEMA};
pub use run::{catalog_listing, execute, run, write_plane_csv, RunOutput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] stratlk::Error),
}
