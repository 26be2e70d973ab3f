use crate::rational::{ParseRationalError, Rational};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("leaf `{leaf}` sits at level {level}, expected horizon {horizon}")]
    NonUniformDepth {
        leaf: String,
        level: usize,
        horizon: usize,
    },
    #[error("leaf `{0}` has non-positive weight")]
    ZeroWeight(String),
    #[error("leaf weights sum to {0}, expected 1")]
    WeightSum(Rational),
    #[error("time {t} outside 0..={horizon}")]
    TimeOutOfRange { t: usize, horizon: usize },
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("negative price for asset {asset} at node `{node}`")]
    NegativePrice { node: String, asset: usize },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    ParseRational {
        line: usize,
        source: ParseRationalError,
    },
    #[error("one-step arbitrage at node `{node}`: the hedging program is unbounded")]
    Unbounded { node: String },
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("ambient dimension {dim} exceeds the vertex enumeration cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("transition polytope at node `{0}` has no strictly positive point")]
    NoInteriorPoint(String),
    #[error("arbitrage at node `{node}` with strategy {strategy:?}")]
    ArbitrageDetected { node: String, strategy: Vec<String> },
    #[error("weights do not sum to one on atom {0}")]
    MixingWeights(usize),
    #[error("claim is not flagged nonnegative")]
    NegativeClaim,
    #[error("not a stopping time: {0}")]
    NotAStoppingTime(String),
    #[error("process is negative at node `{0}`")]
    NegativeProcess(String),
    #[error("process is not a supermartingale at node `{0}`")]
    NotSupermartingale(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("internal consistency check failed: {0}")]
    Mismatch(String),
}
