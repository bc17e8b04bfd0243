use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unknown boundary condition `{0}` (expected one of D, N, DN, ND, EM)")]
    UnknownBoundary(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("construction failed: {message} (condition number {condition:.3e})")]
    Construction { message: String, condition: f64 },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("integration error: {0}")]
    Integration(String),

    #[error("matching violation in `{relation}`: residual {residual:.3e} exceeds {tolerance:.1e}")]
    MatchingViolation {
        relation: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Domain,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::UnknownBoundary(_)
            | Error::UnsupportedConfiguration(_)
            | Error::Input(_)
            | Error::Parse(_)
            | Error::Json(_)
            | Error::Csv(_) => ErrorClass::Usage,
            Error::Domain(_) | Error::Geometry(_) | Error::Degenerate(_) => ErrorClass::Domain,
            Error::Fit(_)
            | Error::Construction { .. }
            | Error::Evaluation(_)
            | Error::Integration(_)
            | Error::MatchingViolation { .. }
            | Error::Truncation(_) => ErrorClass::Numerical,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}
