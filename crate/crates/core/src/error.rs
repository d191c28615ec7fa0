use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("variable x{index} is out of range for a ring in x0..x{max}")]
    VariableOutOfRange { index: usize, max: usize },

    #[error("exponent overflow")]
    ExponentOverflow,

    #[error("operands live in different rings")]
    RingMismatch,

    #[error("{q} is not a power of {p}")]
    NotPowerOfP { q: u64, p: u64 },

    #[error("the polynomial is zero")]
    ZeroPolynomial,

    #[error("the polynomial is not in the homogeneous maximal ideal (nonzero constant term)")]
    NotInMaximalIdeal,

    #[error("the polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("degree {d} is not n+1 = {expected}")]
    NotCalabiYau { d: u64, expected: u64 },

    #[error("unmet hypothesis: {0}")]
    Hypothesis(String),

    #[error("certificate is not exact; closed form unavailable")]
    InexactCertificate,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("family of {size} members exceeds the budget of {budget}")]
    BudgetExceeded { size: u64, budget: u64 },

    /// A proven statement failed on computed data. Signals a bug or a counterexample.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Whether the error comes from a broken invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}
