use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch, expected {expected} but found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{op}: matrix must be square, got {nrows}x{ncols}")]
    NotSquare {
        op: &'static str,
        nrows: usize,
        ncols: usize,
    },
    #[error("matrix is singular to working tolerance at pivot index {index} (|pivot| = {magnitude:e})")]
    SingularPivot { index: usize, magnitude: f64 },
    #[error("zero diagonal entry at row {row}")]
    ZeroDiagonal { row: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid transfer: {0}")]
    InvalidTransfer(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dense operation on {entries} entries exceeds the dense limit of {limit}")]
    DenseLimit { entries: usize, limit: usize },
    #[error("coarsest operator could not be factorized ({source}); try a different complex shift")]
    CoarseSolve {
        #[source]
        source: Box<Error>,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
