use thiserror::Error;

/// Errors produced by mesh construction, operator assembly and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PampaError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order mismatch: expected {expected}, got {got}")]
    OrderMismatch { expected: usize, got: usize },

    #[error("singular linear system ({0})")]
    Singular(String),

    #[error("matrix is not symmetric positive definite")]
    NotSpd,

    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),

    #[error("solution blew up at t = {t}: |dof| = {value:e}")]
    BlowUp { t: f64, value: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PampaError {
    fn from(e: std::io::Error) -> Self {
        PampaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PampaError>;
