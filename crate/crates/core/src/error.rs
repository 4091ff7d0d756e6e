use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors are reported with 1-based node labels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {0} is unassigned")]
    Unassigned(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance has {size} nodes, over the exact-search cap of {cap}")]
    OverCap { size: usize, cap: usize },
    #[error("streams per message b = {b} exceed the coding dimension C = {c}")]
    StreamsExceedDimension { b: usize, c: usize },
    #[error("coloring has local width {found}, above the target {target}")]
    WidthViolation { target: usize, found: usize },
    #[error("integer overflow while building {0}")]
    Overflow(&'static str),
    #[error("generated vector set failed the independence check")]
    VerificationFailed,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("non-finite loss during update: {0}")]
    NonFiniteLoss(String),
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
