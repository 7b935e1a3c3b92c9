use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    InvalidGenerator { index: i64, rank: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("radius {radius} is smaller than the longest translating element ({needed})")]
    RadiusTooSmall { radius: usize, needed: usize },
    #[error("input graph is not evenly colored: {0}")]
    NotEvenlyColored(String),
    #[error("hypotheses of the transfer fail for this F: |Φ| = {phi}, |F| = {f}, k = {k}")]
    TransferHypotheses { phi: usize, f: usize, k: usize },
    #[error("Følner cube search exceeded side limit {0}")]
    CubeLimit(usize),
    #[error("wreath size n = {n} is below the required bound {bound}")]
    WreathTooSmall { n: u64, bound: String },
    #[error("the identity has no root decomposition")]
    IdentityWord,
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
