//! Batch experiment runner for the coning-motion studies: per-window error
//! curves, method comparisons, sensor-error runs and the convergence-region
//! sweep, written as CSV.

pub mod csv;
pub mod numfmt;
pub mod runner;
pub mod spec;

pub use runner::{
    run, run_compare, run_noise, run_reconstruct, run_sweep_convergence, ErrorRecord, Motion, Report, RunOutput,
    SweepRow, WindowDiagnostic,
};
pub use spec::{Algorithm, RunSpec, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
