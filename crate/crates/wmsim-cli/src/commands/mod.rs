//! Subcommand implementations. Each returns a table to render plus the
//! parameter map recorded in JSON metadata.

pub mod classical_sym;
pub mod dot_s3;
pub mod dwell;
pub mod junction;
pub mod scans;
pub mod selftest;

use std::collections::BTreeMap;
use wmsim_core::classical::ClassicalError;
use wmsim_core::models::ModelError;
use wmsim_core::moments::MomentError;
use wmsim_core::quantum::QuantumError;

#[derive(Debug)]
pub enum CliError {
    /// Flag/precondition violations → exit 2.
    Validation(String),
    /// Numerical non-convergence → exit 3.
    NonConvergence(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid arguments: {m}"),
            CliError::NonConvergence(m) => write!(f, "numerical non-convergence: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ClassicalError> for CliError {
    fn from(e: ClassicalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub fn params_map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}
