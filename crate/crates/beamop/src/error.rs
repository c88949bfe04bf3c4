//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evanescent wave: k_perp = {k_perp} exceeds omega/c = {k_max}")]
    EvanescentWave { k_perp: f64, k_max: f64 },

    #[error("amplitude vector is not normalized: |norm - 1| = {deviation}")]
    NotNormalized { deviation: f64 },

    #[error("truncation order {ncut} too small, need at least {min}")]
    NcutTooSmall { ncut: usize, min: usize },

    #[error("tilt angles undefined: <Pz> = 0")]
    UndefinedTilt,

    #[error("per-photon quantities undefined: photon flux <Pz> = {0}")]
    ZeroPhotonFlux(f64),

    #[error("operation requires a coherent state")]
    NotCoherent,

    #[error("grid coverage insufficient: {0}")]
    GridCoverage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(format!(
            "{} (line {}, column {})",
            err,
            err.line(),
            err.column()
        ))
    }
}
