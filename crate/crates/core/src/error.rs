use thiserror::Error;

use crate::numeric::Rational;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size mismatch: set has {set} elements, spectrum has {spectrum}")]
    SizeMismatch { set: usize, spectrum: usize },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("not a spectrum: frequencies {0} and {1} are not orthogonal")]
    NotASpectrum(Rational, Rational),

    #[error("not a Hadamard pair: frequencies {0} and {1} are not orthogonal")]
    NotAHadamardPair(Rational, Rational),

    #[error(
        "not a local translation matrix: B^({from} - {to}) does not map delta_{from} to delta_{to}"
    )]
    NotLocalTranslation { from: i64, to: i64 },

    #[error("degenerate eigenvalue at phase {0}")]
    DegenerateEigenvalue(f64),

    #[error("eigenvalue phase {phase} is not a root of unity of order {order}")]
    UnsnappableEigenvalue { phase: f64, order: u64 },

    #[error("spectrum {{0}} has no minimal lattice")]
    ZeroSpectrum,

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no complement possible: |A| = {size} does not divide d = {modulus}")]
    NoComplementPossible { size: usize, modulus: u64 },

    #[error("unsupported cardinality {0}; expected 2, 3 or 5")]
    UnsupportedCardinality(usize),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Stable snake_case identifier of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::InvalidSet(_) => "invalid_set",
            Error::InvalidSpectrum(_) => "invalid_spectrum",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotUnitary => "not_unitary",
            Error::NotASpectrum(..) => "not_a_spectrum",
            Error::NotAHadamardPair(..) => "not_a_hadamard_pair",
            Error::NotLocalTranslation { .. } => "not_local_translation",
            Error::DegenerateEigenvalue(_) => "degenerate_eigenvalue",
            Error::UnsnappableEigenvalue { .. } => "unsnappable_eigenvalue",
            Error::ZeroSpectrum => "zero_spectrum",
            Error::HypothesisViolation(_) => "hypothesis_violation",
            Error::NoComplementPossible { .. } => "no_complement_possible",
            Error::UnsupportedCardinality(_) => "unsupported_cardinality",
            Error::Overflow(_) => "overflow",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
