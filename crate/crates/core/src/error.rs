use convexroof_sdp::SdpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RoofError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),
    #[error("no quantum state matches data")]
    Infeasible,
    #[error("solver did not reach optimality: {0}")]
    NotOptimal(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Solver(#[from] SdpError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RoofError>;
