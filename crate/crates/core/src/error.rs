use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("code dimension {dimension} exceeds the enumeration limit of {limit}")]
    DimensionOverflow { dimension: usize, limit: usize },
    #[error("malformed parity-check matrix: {0}")]
    MalformedMatrix(String),
    #[error("unknown built-in subcode `{0}` (expected C1 or C2)")]
    UnknownSubcode(String),
    #[error(
        "code length {0} is too large for exhaustive automorphism search (max 8); \
         supply the permutation table manually"
    )]
    AutomorphismSearchTooLarge(usize),
    #[error("invalid permutation table: {0}")]
    InvalidPermutations(String),
    #[error("subcode `{0}` has no permutation table")]
    MissingPermutationTable(String),
    #[error("inconsistent hard evidence: no codeword matches the infinite input LLRs")]
    InconsistentEvidence,
    #[error("density grids differ")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph cleaning gave up after {attempts} swaps with {remaining} violations left")]
    CleaningExhausted { attempts: usize, remaining: usize },
    #[error("no graph free of SPC-only cycles after {attempts} attempts")]
    ExpurgationExhausted { attempts: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
