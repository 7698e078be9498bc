use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("division by zero in a finite field")]
    DivisionByZero,

    #[error("parameter regime violated: {0}")]
    RegimeViolation(String),

    #[error("construction infeasible: {0}")]
    Infeasible(String),

    #[error("requested {requested} codewords but the code has only {available} nonzero codewords")]
    TooMany { requested: u64, available: u64 },

    #[error("budget exceeded: {needed} checks needed, limit {limit}")]
    BudgetExceeded { needed: u64, limit: u64 },

    #[error("alphabet too small: {0}")]
    AlphabetTooSmall(String),

    #[error("density infeasible: {0}")]
    EpsilonInfeasible(String),

    #[error("insufficient alphabet: {0}")]
    InsufficientAlphabet(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True when the error is a resource limit rather than a parameter problem.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
