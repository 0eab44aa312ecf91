use std::path::PathBuf;

use bistable_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
    #[error("solver failed: {0}")]
    Solver(Error),
    #[error("{0}")]
    Divergence(Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Divergence(_) => 5,
            CliError::Io { .. } => 1,
        }
    }

    /// Short status used in sweep tables.
    pub fn status(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "ValidationError",
            CliError::Hypothesis(_) => "HypothesisFailure",
            CliError::Solver(e) | CliError::Divergence(e) => kind(e),
            CliError::Io { .. } => "IoError",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { .. } => CliError::Divergence(e),
            Error::NonNegativeSlope { .. } => CliError::Hypothesis(e.to_string()),
            Error::InvalidGrid(_) | Error::InvalidPolynomial(_) | Error::InvalidReaction(_) => {
                CliError::Validation(vec![e.to_string()])
            }
            _ => CliError::Solver(e),
        }
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "Domain",
        Error::InvalidPolynomial(_) => "InvalidPolynomial",
        Error::InvalidReaction(_) => "InvalidReaction",
        Error::NonNegativeSlope { .. } => "NonNegativeSlope",
        Error::NoPositiveRoot { .. } => "NoPositiveRoot",
        Error::PathCollapse { .. } => "PathCollapse",
        Error::BracketFailure { .. } => "BracketFailure",
        Error::Integration(_) => "Integration",
        Error::Divergence { .. } => "Divergence",
        Error::NoFront => "NoFront",
        Error::InsufficientData { .. } => "InsufficientData",
        Error::NonPositiveDistance { .. } => "NonPositiveDistance",
        Error::DegenerateProfile(_) => "DegenerateProfile",
        Error::InvalidGrid(_) => "InvalidGrid",
    }
}
