use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear system is numerically singular (condition estimate {cond:.3e})")]
    SingularSystem { cond: f64 },

    #[error("Pearson recurrence blocked at index {0}: psi1 + {0}*phi2 is singular")]
    RecurrenceBlocked(usize),

    #[error("moment {0} is not available from this source")]
    MomentUnavailable(usize),

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("invalid recurrence data: {0}")]
    InvalidRecurrence(String),

    #[error("derivative segment not orthogonal: psi1 + {0}*phi2 is singular")]
    DerivativeNotOrthogonal(usize),

    #[error("ladder relation blocked: M_{0} is singular")]
    LadderBlocked(usize),

    #[error("tilde Pearson construction blocked: {0}")]
    TildeBlocked(String),

    #[error("derivative chain broken at level {level}: {reason}")]
    ChainBroken { level: usize, reason: String },

    #[error("closed form blocked: singular ladder factor at index {0}")]
    ClosedFormBlocked(usize),

    #[error("ODE back-substitution blocked: M_{0} is singular")]
    OdeSolveBlocked(usize),

    #[error("hermiticity required: {0}")]
    HermiticityRequired(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("no scalar Pearson generator found up to degree {0}")]
    NoGeneratorFound(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown gallery example: {0}")]
    UnknownExample(String),

    #[error("non-hermitian input where hermitian matrices are required")]
    NonHermitianInput,

    #[error("invalid functional spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
