use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("invalid unit ball: {0}")]
    InvalidBall(String),
    #[error("degenerate line: the two defining points coincide")]
    DegenerateLine,
    #[error("identical centers")]
    IdenticalCenters,
    #[error("seed point is not on the unit ball boundary (norm = {0})")]
    SeedNotOnBoundary(f64),
    #[error("identical points")]
    IdenticalPoints,
    #[error("empty terminal set")]
    EmptyTerminals,
    #[error("partitions do not share the same ball, frame, terminals and box")]
    MismatchedPartitions,
    #[error("point lies outside the working box")]
    OutOfBox,
    #[error("empty input")]
    EmptyInput,
    #[error("forest is not viable: {0}")]
    NonViableForest(String),
    #[error("preprocessing tables do not match the tree")]
    TableMismatch,
    #[error("negative edge length {0}")]
    NegativeLength(f64),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("fixed-topology tolerance not reached: {0}")]
    ToleranceNotReached(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("line {line}, column {column}: {message}")]
    Malformed { line: usize, column: usize, message: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit status: 2 for numerical or internal failures, 1 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ToleranceNotReached(_) | Error::Internal(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
