use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Hermitian (deviation {deviation:.3e}) in {context}")]
    NotHermitian { context: String, deviation: f64 },
    #[error("equality constraints are inconsistent (row {row}, residual {residual:.3e})")]
    InconsistentEqualities { row: usize, residual: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SdpError>;
