use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} outside supported range 1..=2^20")]
    ModulusOutOfRange(u64),
    #[error("{x} is not a unit modulo {q}")]
    NotAUnit { x: u64, q: u64 },
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("{d} does not divide {q}")]
    NotADivisor { d: u64, q: u64 },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("vector length {got} does not match modulus {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("non-unit denominator {denominator} modulo {q}")]
    DenominatorNotUnit { denominator: u64, q: u64 },
    #[error("no cover exists: {0}")]
    Infeasible(String),
    #[error("malformed set literal: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
