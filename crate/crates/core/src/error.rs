use thiserror::Error;

/// Failure modes shared by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} exceeds the sieve limit {limit}")]
    Capacity { value: u64, limit: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed coefficient at token {position}: {token:?}")]
    Parse { position: usize, token: String },

    #[error("degenerate mollifier: rational part of D is zero")]
    DegenerateMollifier,

    #[error("infeasible mollifier: rational part of D is negative")]
    InfeasibleMollifier,

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("tail certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("search failed: {0}")]
    Search(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
