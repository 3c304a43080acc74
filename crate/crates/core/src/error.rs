use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("map is not a bijection")]
    NotBijection,
    #[error("map is not a complete mapping")]
    NotComplete,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("domain of {0} points exceeds the exhaustive-analysis limit")]
    DomainTooLarge(u64),
}

impl Error {
    /// Whether the error reports a well-formed request that has no solution,
    /// as opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible(_) | Error::NotComplete)
    }
}
