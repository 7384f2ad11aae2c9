//! Crate-wide error type.

use crate::expr::{EvalError, ParseError};
use crate::obstruction::ObstructionReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("non-finite value: {context}")]
    NonFinite { context: String },

    #[error("point leaves domain: axis {axis} value {value} outside [{min}, {max}]")]
    DomainBoundary {
        axis: usize,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("singular frame: |det| = {det:.3e} at or below threshold in {context}")]
    SingularFrame { det: f64, context: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("adapted coordinates required: {0}")]
    AdaptedRequired(String),

    #[error(
        "frame construction refused: obstruction max norm {:.6e} at tolerance {:.3e}",
        .0.max_norm, .0.tolerance
    )]
    ObstructionFailed(Box<ObstructionReport>),

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
