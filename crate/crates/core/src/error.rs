use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("definite algebra ({0},{1}): both parameters negative")]
    DefiniteAlgebra(String, String),
    #[error("rank-deficient generators")]
    RankDeficient,
    #[error("factorization cap exceeded for {0}")]
    FactorizationCap(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("prime {0} is ramified")]
    RamifiedPrime(String),
    #[error("incompatible orders")]
    IncompatibleOrders,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
    #[error("insufficient split primes in factor base")]
    InsufficientSplitPrimes,
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
