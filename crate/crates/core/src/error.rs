use thiserror::Error;

use crate::oracle::Violation;

/// Which axis of the joint matrix a symbol lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    S,
    X,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::S => write!(f, "S"),
            Axis::X => write!(f, "X"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative probability {value} at (s={row}, x={col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite entry {value} at (s={row}, x={col})")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    #[error("joint distribution sums to {sum}, not 1 within tolerance {tol}")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("symbol '{label}' on axis {axis} has zero marginal probability")]
    DeadSymbol { axis: Axis, label: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate label '{label}' on axis {axis}")]
    DuplicateLabel { axis: Axis, label: String },

    #[error("bad dimensions: need at least 2 symbols per axis, got |S|={num_s}, |X|={num_x}")]
    BadDimensions { num_s: usize, num_x: usize },

    #[error("alpha must be a finite order > 1 or infinity, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    #[error("R is not a probability distribution over the high-risk set: {0}")]
    BadR(String),

    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),

    #[error("the high-risk set is empty")]
    EmptyHighRisk,

    #[error("H(X) = 0, normalized mutual information loss is undefined")]
    DegenerateEntropy,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("oracle found a counterexample: {0}")]
    ViolationFound(Box<Violation>),

    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
