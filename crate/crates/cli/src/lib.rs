//! Experiment harness around `wfc-core`: JSON-configured batch experiments
//! with deterministic seeding and provenance-stamped CSV outputs.

pub mod config;
pub mod experiments;
pub mod harness;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 2 for config problems, 3 for solver failures,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<wfc_core::hamiltonian::HamiltonianError> for RunError {
    fn from(e: wfc_core::hamiltonian::HamiltonianError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<wfc_core::eigensolve::EigenError> for RunError {
    fn from(e: wfc_core::eigensolve::EigenError) -> Self {
        RunError::Solver(e.to_string())
    }
}

impl From<wfc_core::completers::CompleterError> for RunError {
    fn from(e: wfc_core::completers::CompleterError) -> Self {
        match e {
            wfc_core::completers::CompleterError::BadConfig(m) => RunError::Config(m),
            wfc_core::completers::CompleterError::ScheduleBoundary(k) => {
                RunError::Config(format!("schedule {k:?} invalid for open boundaries"))
            }
            other => RunError::Solver(other.to_string()),
        }
    }
}

impl From<wfc_core::sampling::SamplingError> for RunError {
    fn from(e: wfc_core::sampling::SamplingError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<wfc_core::io::IoError> for RunError {
    fn from(e: wfc_core::io::IoError) -> Self {
        match e {
            wfc_core::io::IoError::Io(io) => RunError::Io(io),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl From<wfc_core::qstate::QStateError> for RunError {
    fn from(e: wfc_core::qstate::QStateError) -> Self {
        RunError::Solver(e.to_string())
    }
}
