//! Experiment harness for the amospec pipelines: JSON-configured runs,
//! verification reports with per-check provenance, and CSV/JSON export.
//!
//! Three pipelines mirror the desk-scale checks the library supports:
//!
//! * [`run_verify_mborel`] — the measure-layer inequality suite plus the
//!   degenerate single-atom branch and a biased-Cantor closed form.
//! * [`run_verify_transition`] — builds a finite-volume spectral measure of
//!   the almost Mathieu operator and compares its dimension estimates
//!   against the closed-form transition bounds.
//! * [`run_localization_window`] — selects origin-anchored eigenvectors in
//!   the supercritical regime and scores resonant-site decay windows.
//!
//! Dimension and decay comparisons are always soft (reported with slack,
//! downgraded to warnings on miss); hard failures are reserved for
//! algebraic identities and oracle equivalences. Identical config and seed
//! reproduce identical report bytes modulo wall-clock timing fields.

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod export;
mod localization;
mod mborel;
pub mod report;
mod transition;

pub use config::{
    DiophantineSpec, ExperimentConfig, FrequencySpec, GridSpec, LocalizationSpec, OutputSpec,
    SlackSpec,
};
pub use export::{
    export_measure, export_report, export_spectral, json_17, read_measure_csv, ExportFormat,
};
pub use localization::run_localization_window;
pub use mborel::run_verify_mborel;
pub use report::{
    CheckLine, CheckStatus, Direction, Provenance, Timing, Trace, VerificationReport,
};
pub use transition::{run_verify_transition, site_spectral_measure};

/// Errors from configuration, pipelines, and export.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Invalid or inconsistent configuration.
    #[error("config: {0}")]
    Config(String),
    /// The requested run lies outside the regime the bounds cover.
    #[error("refusing run: {0}")]
    Refused(String),
    /// Output file exists and force was not given.
    #[error("output {} exists; pass force to overwrite", path.display())]
    WouldOverwrite { path: PathBuf },
    /// Filesystem failure on a named path.
    #[error("i/o on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// CSV (de)serialization failure.
    #[error("csv: {0}")]
    Csv(String),
    /// Propagated arithmetic-layer error.
    #[error(transparent)]
    Arith(#[from] amospec::arith::ArithError),
    /// Propagated measure-layer error.
    #[error(transparent)]
    Measure(#[from] amospec::measure::MeasureError),
    /// Propagated operator-layer error.
    #[error(transparent)]
    Operator(#[from] amospec::operator::OperatorError),
    /// Propagated spectral-layer error.
    #[error(transparent)]
    Spectral(#[from] amospec::spectral::SpectralError),
}

impl HarnessError {
    /// Process exit code: 2 for config/input problems, 3 for regime
    /// refusals, 1 for everything that failed mid-run.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::WouldOverwrite { .. } | Self::Io { .. } | Self::Json(_) => 2,
            Self::Refused(_) => 3,
            _ => 1,
        }
    }
}
