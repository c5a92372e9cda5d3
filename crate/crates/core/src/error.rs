use thiserror::Error;

pub type Result<T> = std::result::Result<T, OcoError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OcoError {
    /// A point fell outside its feasible set by more than the membership tolerance.
    #[error("point outside domain: norm {norm} exceeds radius {radius}")]
    Domain { norm: f64, radius: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("label {label} outside [-{bound}, {bound}]")]
    LabelRange { label: f64, bound: f64 },

    #[error("invalid interval [{start}, {end}] for horizon {horizon}")]
    Interval {
        start: usize,
        end: usize,
        horizon: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

impl From<std::io::Error> for OcoError {
    fn from(e: std::io::Error) -> Self {
        OcoError::Io(e.to_string())
    }
}

impl OcoError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        OcoError::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        OcoError::Numerical(msg.into())
    }
}
