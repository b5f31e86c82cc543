use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot parse polynomial: {reason} (token `{token}`)")]
    Parse { token: String, reason: String },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("modulus {0} outside the supported range [2, 2^63)")]
    ModulusOutOfRange(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("polynomial vanishes identically modulo {0}")]
    DegenerateReduction(u64),

    #[error("polynomial must be nonconstant")]
    ConstantPolynomial,

    #[error("limit {limit} exceeds the sieve budget {budget}")]
    BudgetExceeded { limit: u64, budget: u64 },

    #[error("empty prime range: need x > {d}, got x = {x}")]
    EmptyRange { d: u64, x: u64 },

    #[error("n = {n} is too small: need n > {bound}")]
    TooSmall { n: u64, bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
