use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e} > {tol:e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("positivity violation at measurement b={b}, outcome n={n} (min eigenvalue {min_eigenvalue:e})")]
    PositivityViolation {
        /// 1-based measurement index.
        b: usize,
        /// 1-based outcome index.
        n: usize,
        min_eigenvalue: f64,
    },

    #[error("positivity violation: {0}")]
    NotPositive(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("unsupported partition: {0}")]
    UnsupportedPartition(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric integrity: imaginary part {imag:e} exceeds {tol:e}")]
    NumericIntegrity { imag: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid density matrix: {}", .0.join("; "))]
    InvalidDensity(Vec<String>),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
