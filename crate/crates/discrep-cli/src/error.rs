//! CLI errors and their exit codes.
//!
//! - 0: success
//! - 2: the data assumption `‖f_δ‖ > Cδ` failed (the principle does not apply)
//! - 3: numerical failure (no root bracket, root tolerance not met, minimizer
//!   non-convergence)
//! - 64: usage error (bad flags, unknown problem, invalid parameter region)
//! - 66: output path not writable

use std::path::PathBuf;

use discrep_core::{DiscrepancyError, GalleryError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solve(DiscrepancyError),
    #[error("cannot write output to {path}: {source}")]
    OutputIo {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::OutputIo { .. } => 66,
            CliError::Solve(e) => match e {
                DiscrepancyError::AssumptionViolation { .. } => 2,
                DiscrepancyError::InvalidConfig { .. } | DiscrepancyError::BadDelta { .. } => 64,
                _ => 3,
            },
        }
    }
}

impl From<DiscrepancyError> for CliError {
    fn from(e: DiscrepancyError) -> Self {
        CliError::Solve(e)
    }
}

impl From<GalleryError> for CliError {
    fn from(e: GalleryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Short machine-readable status for CSV rows.
pub fn status_name(e: &DiscrepancyError) -> &'static str {
    use discrep_core::TikhonovError;
    match e {
        DiscrepancyError::AssumptionViolation { .. } => "assumption-violation",
        DiscrepancyError::NoRoot { .. } => "no-root",
        DiscrepancyError::RootToleranceNotMet { .. } => "root-tolerance-not-met",
        DiscrepancyError::Minimizer(TikhonovError::NonConvergence { .. }) => "non-convergence",
        DiscrepancyError::Minimizer(_) => "minimizer-error",
        DiscrepancyError::InvalidConfig { .. } => "invalid-config",
        DiscrepancyError::BadDelta { .. } => "invalid-delta",
    }
}
