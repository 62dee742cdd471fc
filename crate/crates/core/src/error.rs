use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus conflict: {0}")]
    ModulusConflict(String),

    #[error("not invertible: leading coefficient {0} is not a unit")]
    NotInvertible(String),

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point is not in the upper half-plane (Im z = {0})")]
    NotInUpperHalfPlane(f64),

    #[error("insufficient truncation: tail bound {tail_bound:e} exceeds tolerance {tolerance:e}")]
    InsufficientTruncation { tail_bound: f64, tolerance: f64 },

    #[error("window underflow: truncation {available} available, {required} required")]
    WindowUnderflow { required: i64, available: i64 },

    #[error("fractional exponent: total eta offset {numerator}/24 is not an integer")]
    FractionalExponent { numerator: i64 },

    #[error("Newman condition failed: {0}")]
    NewmanCondition(String),

    #[error("mod-4 identity violated at n = {n}: cphi_2(n) - p(n/2) = {value}")]
    Mod4IdentityViolated { n: i64, value: String },

    #[error("theorem requires t>1 (got t = {0})")]
    TheoremRequiresT(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("count overflow in theta enumeration")]
    Overflow,
}
