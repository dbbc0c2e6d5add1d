use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field of order {p}^{s} exceeds the size bound {limit}")]
    FieldTooLarge { p: u64, s: usize, limit: u64 },

    #[error("incompatible fields: {0}")]
    IncompatibleFields(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("variable x{index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("exponent overflow (exponents are limited to 16 bits per variable)")]
    ExponentOverflow,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("work budget exceeded: {required} evaluation steps required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("projective point has no nonzero coordinate")]
    ZeroPoint,

    #[error("characteristic {p} divides the degree {d}")]
    CharacteristicDividesDegree { p: u64, d: u32 },

    #[error("predicted dimension is negative: (d-1)^n = {top}, sum of Milnor numbers = {milnor_sum}")]
    NegativeDimension { top: i128, milnor_sum: i128 },

    #[error("Euler characteristic chain gives {chain}, closed form gives {closed}")]
    ChainMismatch { chain: i128, closed: i128 },

    #[error("standard monomial count exceeds the bound {0}")]
    StandardMonomialBound(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
