use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("Hermitian symmetry violated: max defect {defect:e} exceeds tolerance {tolerance:e}")]
    SymmetryViolation { defect: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("multiplier symbol produced NaN at wavevector {0:?}")]
    NanSymbol(Vec<f64>),

    #[error("blow-up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("Gevrey weight saturates: exponent {exponent:.1} exceeds overflow guard {limit}")]
    GevreyOverflow { exponent: f64, limit: f64 },

    #[error("need at least {required} usable shells above the noise floor, found {found}")]
    InsufficientShells { required: usize, found: usize },

    #[error("need at least {required} samples in the fit window, found {found}")]
    InsufficientSamples { required: usize, found: usize },

    #[error("non-positive value {value} at t = {time} cannot be log-transformed")]
    NonPositiveValue { time: f64, value: f64 },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error(
        "Picard iteration does not contract: distance grew 3 times in a row, last ratio {ratio:.4}"
    )]
    NonContraction { ratio: f64 },

    #[error("Picard iteration did not reach tolerance {tolerance:e} in {iterations} iterations (last distance {distance:e})")]
    PicardNotConverged {
        iterations: usize,
        distance: f64,
        tolerance: f64,
    },

    #[error("Hölder exponents mismatch: 1/{p} != 1/{a} + 1/{b}")]
    HolderMismatch { p: f64, a: f64, b: f64 },

    #[error("zero denominator in ratio")]
    ZeroDenominator,

    #[error("dyadic block {j} outside bank range [{min}, {max}]")]
    BlockOutOfRange { j: i32, min: i32, max: i32 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}
