use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("field of size {p}^{k} exceeds the configured limit of 2^{limit_bits}")]
    FieldTooLarge { p: u64, k: u32, limit_bits: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(u32),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("symbolic expansion exceeded the term cap of {0}")]
    TermCap(usize),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("enumeration of {needed} states exceeds the cap of {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("seed tuple contains duplicates")]
    DuplicateSeeds,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
