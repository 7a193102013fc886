use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("modulus {modulus:#x} of degree {degree} is reducible")]
    ReducibleModulus { degree: u32, modulus: u64 },

    #[error("unsupported field degree {0} (supported: 1..=32)")]
    UnsupportedDegree(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distribution is not normalized (total mass {0})")]
    NotNormalized(f64),

    #[error("sample spaces differ: {0} vs {1} bits")]
    SampleSpaceMismatch(u32, u32),

    #[error("window [{lo}, {hi}] contains no integer weight")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error(
        "exact enumeration needs {needed} evaluations, above the limit of {limit}; \
         use Monte-Carlo mode for this size"
    )]
    Infeasible { needed: u128, limit: u128 },

    #[error("claim violates the hash-lemma bound: {0}")]
    ClaimBound(String),

    #[error("matrix has rank {rank}, expected full rank {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("matrices are not dual: {0}")]
    NotDual(String),

    #[error("noise components must have non-increasing support sizes")]
    ComponentOrder,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
