//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice mismatch: expected dim {expected_dim}, cutoff {expected_n}, got dim {dim}, cutoff {n}")]
    LatticeMismatch {
        expected_dim: usize,
        expected_n: i32,
        dim: usize,
        n: i32,
    },

    #[error("grid of {m} points per axis cannot dealias cutoff {n}; need at least {required}")]
    GridTooSmall { m: usize, n: i32, required: usize },

    #[error("multiplier is not finite at k = {k:?}")]
    NonFiniteMultiplier { k: [i32; 3] },

    #[error("unsupported dimension {0}; only 2 and 3 are implemented")]
    UnsupportedDim(usize),

    #[error("unknown exact solution `{0}`")]
    UnknownExactSolution(String),

    #[error("exact solution `{name}` needs lattice cutoff >= {required}, got {n}")]
    LatticeTooCoarse {
        name: &'static str,
        required: i32,
        n: i32,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("run at nu = {nu} terminated early: {status}")]
    RunFailed { nu: f64, status: String },

    #[error("rate fit needs at least {required} usable rows, got {got}")]
    TooFewRows { required: usize, got: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("serialization: {0}")]
    Serde(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
