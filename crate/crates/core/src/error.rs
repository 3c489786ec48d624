use thiserror::Error;

/// Syntax error in an `E(n)` expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("E(n) requires n >= 1")]
    ZeroConductor,
    #[error("{k} is not coprime to the conductor {conductor}")]
    NotCoprime { k: i64, conductor: u32 },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed table: {0}")]
    Syntax(String),
    #[error("character value [{row}][{col}]: {source}")]
    Value {
        row: usize,
        col: usize,
        #[source]
        source: ParseError,
    },
    /// A validation check on a parsed table failed; the message names it.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("index {index} out of range for {k} characters")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("class function has length {got}, table has {expected} classes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("partitions are over different ground sets")]
    GroundSetMismatch,
    #[error("{0}")]
    InvalidPartition(String),
    #[error("the table has irrational character values")]
    NotRational,
    #[error("invalid size range {min}..={max} for {k} characters")]
    InvalidRange { min: usize, max: usize, k: usize },
    #[error("oracle enumeration is limited to {limit} characters, table has {k}")]
    OracleLimit { k: usize, limit: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Cyclotomic(#[from] CycError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
