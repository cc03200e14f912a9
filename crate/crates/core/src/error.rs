use thiserror::Error;

/// Violations of the teacher/student contract and the parameter-space types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter space: {0}")]
    InvalidSpace(String),

    #[error("component {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("a proposal is already outstanding; observe it before proposing again")]
    ProposalOutstanding,

    #[error("no proposal is outstanding")]
    NoOutstandingProposal,

    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
