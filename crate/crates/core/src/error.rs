use thiserror::Error;

/// Errors raised by the library. Check failures (nonzero residuals, spectrum
/// mismatches) are reported in result values, never through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorCountMismatch { left: usize, right: usize },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("charge matrix is not antisymmetric at ({row}, {col})")]
    NotAntisymmetric { row: usize, col: usize },
    #[error("dimension {0} is odd; an even dimension 2l is required")]
    OddDimension(usize),
    #[error("charge matrix is singular within tolerance (smallest frequency {smallest:e}, threshold {threshold:e})")]
    SingularCharges { smallest: f64, threshold: f64 },
    #[error("frequency component {0} is zero")]
    ZeroBeta(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is not in Cartan block form")]
    NonCartan,
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),
    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("Weyl group rank {l} exceeds the enumeration bound {bound}")]
    RankTooLarge { l: usize, bound: usize },
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("scaled level arithmetic overflows 128-bit integers")]
    Overflow,
    #[error("expected a real linear combination of generators, got {0}")]
    NotLinear(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
