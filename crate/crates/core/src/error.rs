use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arity n={n}: {reason}")]
    InvalidArity { n: usize, reason: String },
    #[error("unknown catalog function `{0}`")]
    UnknownFunction(String),
    #[error("empty fiber: output {0} is not in the image of f")]
    EmptyFiber(u64),
    #[error("empty domain")]
    EmptyDomain,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate input {0} in function entries")]
    DuplicateInput(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("value out of [0, 1] beyond tolerance: {0}")]
    OutOfUnitInterval(f64),
    #[error("function must be total for this operation")]
    NotTotal,
    #[error("linear program is malformed: {0}")]
    MalformedLp(String),
    #[error("simplex cycling guard tripped after {0} pivots")]
    Cycling(usize),
    #[error("LP unexpectedly infeasible: {0}")]
    Infeasible(String),
    #[error("size limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("budget exceeded: population of {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("gate is not unitary (deviation {0:e})")]
    NonUnitary(f64),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("state norm drifted to {0}")]
    NormDrift(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
