use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain-mismatch: {left} vs {right} variables")]
    DomainMismatch { left: u32, right: u32 },

    #[error("invalid-domain: n = {n} (allowed 1..={cap})")]
    InvalidDomain { n: u32, cap: u32 },

    #[error("index-out-of-range: variable {index} in a domain of {n} variables")]
    IndexOutOfRange { index: usize, n: u32 },

    #[error("table-size: expected {expected} entries, got {got}")]
    TableSize { expected: usize, got: usize },

    #[error("value-out-of-range: entry {index} = {value} violates {what}")]
    ValueOutOfRange {
        index: usize,
        value: f64,
        what: &'static str,
    },

    #[error("invalid-distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid-tolerance: {0}")]
    InvalidTolerance(f64),

    #[error("query-out-of-range: {0}")]
    QueryOutOfRange(String),

    #[error("query-budget-exceeded: more than {0} queries")]
    QueryBudgetExceeded(usize),

    #[error("empty-class")]
    EmptyClass,

    #[error("empty-pool")]
    EmptyPool,

    #[error("cap-exceeded: {size} functions, exact search capped at {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("pool-insufficient: members {uncovered:?} are not covered")]
    PoolInsufficient { uncovered: Vec<usize> },

    #[error("norm-out-of-range: member {index} has norm {norm}, required [{min}, {max}]")]
    NormOutOfRange {
        index: usize,
        norm: f64,
        min: f64,
        max: f64,
    },

    #[error("theta-exceeds-eps: theta = {theta} > eps = {eps}")]
    ThetaExceedsEps { theta: f64, eps: f64 },

    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),

    #[error("parse: line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid-config: {field}: {msg}")]
    Config { field: String, msg: String },

    #[error("invariant-breach: {guarantee}: {detail}")]
    InvariantBreach { guarantee: String, detail: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the command-line tool: 2 for a breached
    /// guarantee, 3 for filesystem or serialization failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantBreach { .. } => 2,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn config(field: &str, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
