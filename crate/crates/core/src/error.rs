use std::fmt;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),

    #[error("schema violation at {location}: {message}")]
    Schema { location: String, message: String },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unit axiom violated at ({0},{1})")]
    UnitAxiom(usize, usize),

    #[error("algebra {0:?} carries no (A1) witness")]
    MissingA1Data(String),

    #[error("invalid (A1) witness: {0}")]
    InvalidA1Witness(String),

    #[error("condition {condition} fails; offending sum = {sum}")]
    ConditionFailed { condition: Condition, sum: String },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("point is singular for this operation: {0}")]
    Singular(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

/// The two structural conditions on which the explicit kernels depend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    A0,
    A1,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::A0 => f.write_str("(A0)"),
            Condition::A1 => f.write_str("(A1)"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
