use std::fmt;

use pampa::PampaError;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input data.
    Validation(String),
    /// Blow-up, singular system or a failed check.
    Numerical(String),
    Io(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<PampaError> for CliError {
    fn from(e: PampaError) -> Self {
        match e {
            PampaError::InvalidMesh(_)
            | PampaError::InvalidArgument(_)
            | PampaError::OrderMismatch { .. }
            | PampaError::UnsupportedOrder(_) => CliError::Validation(e.to_string()),
            PampaError::Io(m) => CliError::Io(m),
            PampaError::BlowUp { .. } | PampaError::Singular(_) | PampaError::NotSpd => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
