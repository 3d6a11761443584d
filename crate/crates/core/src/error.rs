use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("vector length must be at least 1")]
    EmptyVector,

    #[error("invalid digit {value} (expected < {modulus})")]
    InvalidDigit { value: u8, modulus: u8 },

    #[error("invalid involution label: {0}")]
    InvalidLabel(&'static str),

    #[error("component index {index} out of range for n = {n}")]
    ComponentOutOfRange { index: usize, n: usize },

    #[error("dense simulation limited to n <= {max}, got {n}")]
    DenseTooLarge { n: usize, max: usize },

    #[error("cascade needs at least 2 samples, got {0}")]
    CascadeTooShort(usize),

    #[error("samples come from different doubling rounds")]
    MixedRounds,

    #[error("samples already have trivial phase and cannot be doubled again")]
    AlreadyTrivial,

    #[error("flip vector is zero, has the wrong length, or violates the flip constraints")]
    InconsistentFlip,

    #[error("measurement contract violated: {0}")]
    ContractViolation(&'static str),

    #[error("retry budget of {budget} exhausted in {stage}")]
    RetriesExhausted { stage: &'static str, budget: u32 },

    #[error("{stage}: rank {rank} < {needed} after {samples} samples")]
    RankDeficit {
        stage: &'static str,
        rank: usize,
        needed: usize,
        samples: usize,
    },

    #[error("{0}: linear system is inconsistent")]
    Inconsistent(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
