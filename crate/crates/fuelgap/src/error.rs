//! Error type shared across the crate.

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters for {family}: {detail}")]
    InvalidParams { family: String, detail: String },
    #[error("numeric overflow in {0}")]
    Overflow(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("tau {tau} is not attainable by {family}")]
    TauOutOfRange { family: String, tau: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("empty stratum: {0}")]
    EmptyStratum(String),
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-parseable code, emitted as `code=<this>` on stderr by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams { .. } => "invalid-params",
            Error::Overflow(_) => "overflow",
            Error::NoConvergence(_) => "no-convergence",
            Error::Quadrature(_) => "quadrature",
            Error::TauOutOfRange { .. } => "tau-out-of-range",
            Error::Degenerate(_) => "degenerate",
            Error::LengthMismatch(..) => "length-mismatch",
            Error::InsufficientData(_) => "insufficient-data",
            Error::EmptyStratum(_) => "empty-stratum",
            Error::Parse { .. } => "parse",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// CLI exit code: 2 for usage problems, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
