use thiserror::Error;

/// Errors raised by the tree, field, matrix and dynamics layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("division by zero in Z_{p}")]
    DivisionByZero { p: u32 },
    #[error("invalid level {0}: expected 1 <= n <= {max}", max = crate::tree::MAX_LEVEL)]
    InvalidLevel(u32),
    #[error("address {address:?} lies outside the tree truncated at level {n}")]
    AddressOutOfShape { address: String, n: u32 },
    #[error("malformed vertex address {0:?}")]
    InvalidAddress(String),
    #[error("coefficient {name} is zero mod {p}; pass the relaxation flag to allow it")]
    ZeroCoefficient { name: char, p: u32 },
    #[error("matrix is singular mod {p}")]
    SingularMatrix { p: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("enumeration of {requested} items exceeds the cap of {cap}")]
    EnumerationTooLarge { requested: String, cap: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPrimeModulus(_) => "non_prime_modulus",
            Error::DivisionByZero { .. } => "division_by_zero",
            Error::InvalidLevel(_) => "invalid_level",
            Error::AddressOutOfShape { .. } => "address_out_of_shape",
            Error::InvalidAddress(_) => "invalid_address",
            Error::ZeroCoefficient { .. } => "zero_coefficient",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EnumerationTooLarge { .. } => "enumeration_too_large",
            Error::Parse(_) => "parse_error",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
