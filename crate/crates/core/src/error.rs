use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrlError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid distribution at {context}: {detail}")]
    Distribution { context: String, detail: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("reward infeasible at stage {h}, state {s}, action {a}: advantage {advantage:.3e}")]
    Infeasible {
        h: usize,
        s: usize,
        a: usize,
        advantage: f64,
    },

    #[error("effective dimension {dim} exceeds cap {cap}; use the randomized method")]
    DimensionCap { dim: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, IrlError>;
