use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid value: {0}")]
    Domain(String),
    #[error("a single-arm model has no alternative")]
    AltEmpty,
    #[error("binomial({n}, {k}) overflows u64")]
    Overflow { n: u64, k: u64 },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("some arm has not been sampled yet")]
    NotReady,
    #[error("malformed instance file: {0}")]
    Json(#[from] serde_json::Error),
}
