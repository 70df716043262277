use thiserror::Error;

/// Errors raised while parsing pattern, edge-list and network text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    /// Row (0-based) whose length differs from the first row.
    #[error("row {0} has a different number of entries than row 0")]
    RaggedRows(usize),
    /// 0-based row and column of an unrecognised token.
    #[error("bad token {2:?} at row {0}, column {1}")]
    BadToken(usize, usize, String),
    /// 0-based line of a malformed edge-list or header line.
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("row counts differ: {left} vs {right}")]
    RowMismatch { left: usize, right: usize },
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("pattern has more rows ({rows}) than columns ({cols})")]
    WideMatrixRequired { rows: usize, cols: usize },
    #[error("no witness: the pattern is colorable / the system is controllable")]
    WitnessUnavailable,
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("self-loop at node {0} is not allowed here")]
    SelfLoopForbidden(usize),
    #[error("zero vector cannot certify a Hautus failure")]
    ZeroVector,
    #[error("{count} free entries exceed the exhaustive limit of {limit}")]
    TooManyFreeEntries { count: usize, limit: usize },
    #[error("matrix is not a member of the pattern class")]
    NotAMember,
    #[error("invalid leader set: {0}")]
    InvalidLeaders(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
