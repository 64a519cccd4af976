use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffisoError {
    #[error("lambda is constant, so chi divides by zero")]
    ConstantInput,
    #[error("case {case}: second or third derivatives survive in F")]
    CancellationFailure { case: String },
    #[error("F does not involve s'")]
    DegenerateF,
    #[error("prime {p} is unlucky: {reason}")]
    UnluckyPrime { p: u64, reason: String },
    #[error("invalid input: {0}")]
    BadInput(String),
}
