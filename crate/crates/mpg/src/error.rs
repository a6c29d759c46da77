use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpgError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid game: {0}")]
    Model(String),
    #[error("transition relation is not total: no successor for ({state}, {action})")]
    NotTotal { state: String, action: String },
    #[error("observations do not partition states: {0}")]
    Partition(String),
    #[error("game is not limited-observation: {0}")]
    NotLimited(String),
    #[error("integer overflow in weight arithmetic")]
    Overflow,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("not a cycle: first and last observation differ")]
    NotACycle,
    #[error("interleave anchor mismatch at index {0}")]
    AnchorMismatch(usize),
    #[error("depth must be at least 1")]
    DepthTooSmall,
    #[error("belief construction exceeded cap of {0} states")]
    BeliefCap(usize),
    #[error("state space exceeded cap of {0} nodes")]
    StateSpaceCap(usize),
    #[error("exploration budget of {0} nodes exceeded")]
    Budget(usize),
    #[error("strategy undefined on {0}")]
    StrategyDomain(String),
    #[error("malformed strategy tree: {0}")]
    MalformedTree(String),
    #[error("game is not FAC")]
    NotFac,
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, MpgError>;
