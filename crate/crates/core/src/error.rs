use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(f64),
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("dimension {dim} exceeds the oracle limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("oracle precondition violated: {0}")]
    Scale(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("infeasible h-profile: {0}")]
    InfeasibleProfile(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("total vertex weight must be positive")]
    ZeroWeight,
    #[error("block list is empty")]
    EmptyBlocks,
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("tree has no antichain of size {0}")]
    NoIncomparableSet(usize),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("n = {0} is below the smallest admissible index")]
    TooSmall(f64),
    #[error("degenerate fit grid: {0}")]
    DegenerateGrid(String),
    #[error("x = {x} is below the monotonicity threshold x0 = {x0}")]
    BelowThreshold { x: f64, x0: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
