use thiserror::Error;

/// Errors raised by state construction, entropy evaluation and relation checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid party selection: {0}")]
    InvalidParties(String),

    #[error("rank {rank} out of range 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),

    #[error("eigensolver did not converge")]
    Eigensolver,

    #[error("covariance matrix has odd dimension {0}")]
    OddDimension(usize),

    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),

    #[error("matrix is not symmetric (defect {0:e})")]
    NotSymmetric(f64),

    #[error("not a bona fide covariance matrix (smallest symplectic eigenvalue {0})")]
    NotBonaFide(f64),

    #[error("state is not pure (defect {0:e})")]
    NotPure(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid entropy spec: {0}")]
    InvalidSpec(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
