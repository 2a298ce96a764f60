use thiserror::Error;

/// Errors raised by the exact and certified computations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ball does not isolate a unique integer (radius too large or no integer inside)")]
    AmbiguousBall,

    #[error("sign could not be certified up to {max_bits} bits of precision")]
    SignUnresolved { max_bits: u32 },

    #[error("precision exhausted at {max_bits} bits while certifying {what}")]
    PrecisionExhausted { what: &'static str, max_bits: u32 },

    #[error("factorization of {n} exceeded the configured budget")]
    FactorizationTimeout { n: u128 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("Dedekind sum needs {terms} terms, over the budget of {budget}")]
    BudgetExceeded { terms: u128, budget: u128 },

    #[error("value is not of the shape q * pi^{pi_power} * D^({d_half_power}/2) expected here")]
    ShapeMismatch { pi_power: u32, d_half_power: i32 },

    #[error("m = {m}: {reason}")]
    InvalidField { m: i64, reason: String },

    #[error("m must be at least 4, got {0}")]
    DomainError(i64),

    #[error("analytic class number estimate {estimate:.4} is not within {margin} of an integer")]
    Inconclusive { estimate: f64, margin: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by exhausted precision, time or iteration budgets.
    pub fn is_resource_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::SignUnresolved { .. }
                | Error::PrecisionExhausted { .. }
                | Error::FactorizationTimeout { .. }
                | Error::BudgetExceeded { .. }
                | Error::Inconclusive { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
