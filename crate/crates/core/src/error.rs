use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate scan: {0}")]
    DegenerateScan(String),
    #[error("scan too noisy: fit rms {rms:.6} m exceeds {max_rms:.6} m")]
    ScanTooNoisy { rms: f64, max_rms: f64 },
    #[error("mode error: {0}")]
    Mode(String),
}

/// Errors raised while reading pose or scan logs.
#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;
