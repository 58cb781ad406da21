//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("quadrature failed to converge: achieved absolute error {achieved:.3e} exceeds tolerance after {subdivisions} subdivisions")]
    QuadratureNonConvergence { achieved: f64, subdivisions: usize },

    #[error("threshold inversion failed: {0}")]
    InversionFailure(String),

    #[error("scenario generation infeasible: {0}")]
    GenerationInfeasible(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}
