use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("omega out of range: {0} is not in (0, 1)")]
    OmegaOutOfRange(f64),

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("sequence index must be at least 1")]
    ZeroIndex,

    #[error("a_{j} = {value} is below 1")]
    ATermBelowOne { j: usize, value: f64 },

    #[error("b_{j} = {value} is below 1")]
    BTermBelowOne { j: usize, value: f64 },

    #[error("a nonmonotone: a_{j} = {prev} > a_{next_j} = {next}", next_j = j + 1)]
    ANonmonotone { j: usize, prev: f64, next: f64 },

    #[error("term {j} is undefined: explicit sequence of length {len} has no tail rule")]
    UndefinedTerm { j: usize, len: usize },

    #[error("invalid sequence family: {0}")]
    InvalidFamily(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("j(x) is undefined for x = {x} <= a_1 = {a1}")]
    JUndefined { x: f64, a1: f64 },

    #[error("tail of the a sequence is undecidable (explicit list without tail rule)")]
    UndecidableTail,

    #[error("cap exceeded: {what} needs at least {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("precondition a_j >= exp(delta * j) fails at j = {j}: a_j = {a_j}")]
    GrowthPrecondition { j: usize, a_j: f64 },

    #[error("empty support")]
    EmptySupport,

    #[error("parameters of the operands differ")]
    ParamsMismatch,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },
}
