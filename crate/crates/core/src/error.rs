use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("the zero polynomial is not a valid input here")]
    ZeroPolynomial,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("value not in field: {0}")]
    NotInField(String),
    #[error("degree {degree} exceeds the supported cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("characteristic {characteristic} must exceed k = {k}")]
    CharacteristicTooSmall { characteristic: u64, k: usize },
    #[error("operation requires a field of characteristic zero")]
    PositiveCharacteristic,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("truncation overflow: degree {needed} required but the map is defined up to degree {bound}")]
    TruncationOverflow { needed: usize, bound: usize },
    #[error("linear system: {0}")]
    Singular(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("map file: {0}")]
    MapFormat(String),
}
