use thiserror::Error;

/// Every failure the library reports. Undefined products are *not* errors;
/// they are `None` results.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has arity {expected} but got {found} arguments")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("hole x{0} occurs more than once")]
    DuplicateHole(usize),
    #[error("a hole cannot be the root")]
    HoleAtRoot,
    #[error("hole x{index} exceeds declared arity {arity}")]
    HoleOutOfRange { index: usize, arity: usize },
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("order is not antisymmetric on `{0}` and `{1}`")]
    NotAntisymmetric(String, String),
    #[error("incomparable arities: `{0}` and `{1}` are related but differ in arity")]
    MixedArityOrder(String, String),
    #[error("element does not belong to the slice: {0}")]
    SliceMismatch(String),
    #[error("cannot generate a tree: {0}")]
    Generator(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
