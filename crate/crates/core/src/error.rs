use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: expected 2 <= q <= 2^62")]
    InvalidModulus(u64),
    #[error("{n} is not invertible modulo {q}")]
    NotInvertible { n: i64, q: u64 },
    #[error("exponent vector has a zero component at position {index}; exponents must be nonzero")]
    ZeroExponent { index: usize },
    #[error("exponent {k} exceeds the magnitude cap {cap}")]
    ExponentTooLarge { k: i64, cap: u64 },
    #[error("vector lengths disagree: {what}")]
    DimensionMismatch { what: &'static str },
    #[error("modulus m at position {index} must be >= 1")]
    ZeroProgressionModulus { index: usize },
    #[error("CRT plan was built for q={plan}, but the sum is modulo q={args}")]
    PlanMismatch { plan: u64, args: u64 },
    #[error("all coefficients are zero; the bound ratio is undefined")]
    AllZeroCoefficients,
    #[error("gcd(m_{index}={m}, q={q}) > 1; the congruence-system form needs coprime moduli")]
    CoprimalityViolation { index: usize, m: u64, q: u64 },
    #[error("q={0} is even; the parity problem needs an odd modulus")]
    EvenModulus(u64),
    #[error("need at least {needed} points with |E| >= 1 for a fit, got {usable}")]
    InsufficientData { usable: usize, needed: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("intermediate value overflowed 128-bit arithmetic")]
    Overflow,
}
