use thiserror::Error;

use crate::linalg::Diagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix side {side} exceeds the size cap {cap}")]
    SizeCap { side: usize, cap: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(Diagnostics),

    #[error("combination leaves the state space (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("pure state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigenvalue {0:e} below the PSD floor")]
    NegativeEigenvalue(f64),

    #[error("binomial window [{lo}, {hi}] is empty")]
    EmptyWindow { lo: i64, hi: i64 },

    #[error("binomial window carries no probability mass")]
    ZeroWindowMass,

    #[error("decomposition size {k} is smaller than the state rank {rank}")]
    DecompositionTooSmall { k: usize, rank: usize },

    #[error("rate undefined: {0}")]
    UndefinedRate(String),

    #[error("ball not certified: sample {index} has ed_lower = 0")]
    BallNotCertified { index: usize },

    #[error("not certified: {0}")]
    NotCertified(String),

    #[error("could not draw a ball direction distinct from the center after {attempts} attempts")]
    RescaleFailed { attempts: usize },

    #[error("state lies outside the ball (T = {distance}, epsilon = {epsilon})")]
    OutsideBall { distance: f64, epsilon: f64 },

    #[error("state file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
