use thiserror::Error;

/// Every failure mode of the library. The CLI maps these onto exit codes
/// through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("rational input: Gauss iteration terminated after {terms} terms")]
    RationalInput { terms: usize },

    #[error("insufficient terms: need {needed}, have {available}")]
    InsufficientTerms { needed: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergent depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("evaluation budget exceeded: {needed} evaluations requested, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("Hölder bound violated: |χ(x)-χ(y)| = {lhs:.6e} > C|x-y|^α = {rhs:.6e}")]
    HolderViolation { lhs: f64, rhs: f64 },

    #[error("undersampled: {0}")]
    Undersampled(String),

    #[error("insufficient ladder: {points} points, need at least {required}")]
    InsufficientLadder { points: usize, required: usize },

    #[error("unreliable scan at epsilon = {epsilon}: {reason}")]
    UnreliableScan { epsilon: f64, reason: String },

    #[error("integrator did not converge: {0}")]
    NonConvergent(String),

    #[error("monotonicity violated: <Au-Av,u-v> = {lhs:.6e} < M|u-v|^alpha = {rhs:.6e}")]
    MonotonicityViolation { lhs: f64, rhs: f64 },

    #[error("transient not settled: {0}")]
    TransientNotSettled(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 validation, 3 budget, 4 numeric certification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 3,
            Error::PrecisionExhausted(_)
            | Error::RationalInput { .. }
            | Error::DepthExhausted(_)
            | Error::NonConvergent(_)
            | Error::Undersampled(_)
            | Error::TransientNotSettled(_)
            | Error::HolderViolation { .. }
            | Error::MonotonicityViolation { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
