use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern must have at least one vertex")]
    EmptyPattern,
    #[error("pattern has {k} vertices, at most {max} are supported")]
    PatternTooLarge { k: usize, max: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {u}-{v} has an endpoint outside 0..{k}")]
    EndpointOutOfRange { u: usize, v: usize, k: usize },
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("pattern has no edges")]
    EdgelessPattern,
    #[error("vertices must be distinct, got {0} twice")]
    SameVertex(usize),
    #[error("edge count {m} outside the admissible range 0..={max}")]
    EdgeCountOutOfRange { m: u64, max: u64 },
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("subset on part {0} is empty")]
    EmptySubset(usize),
    #[error("no block between parts {0} and {1}")]
    MissingBlock(usize, usize),
    #[error("graphs are incompatible: {0}")]
    Mismatch(String),
    #[error("part size {0} must be even")]
    OddPartSize(usize),
    #[error("block {i}-{j} holds {count} edges, not divisible by {rounds}")]
    NotDivisible {
        i: usize,
        j: usize,
        count: usize,
        rounds: usize,
    },
    #[error("exact check needs {required} subset evaluations, cap is {cap}")]
    EnumerationCap { required: u128, cap: u128 },
    #[error("count overflowed 128 bits")]
    CountOverflow,
    #[error("deletion set of size {size} exceeds budget {budget}")]
    BudgetExceeded { size: usize, budget: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}
