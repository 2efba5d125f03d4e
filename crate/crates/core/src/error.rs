use thiserror::Error;

/// Errors raised by the computation engine.
///
/// Verification failures (an axiom that does not hold) are reported through
/// reports, not through this type; `Error` is for computations that cannot be
/// carried out as requested.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("composition of differentials is not zero ({0} nonzero entries)")]
    CompositionNotZero(usize),
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("degree {requested} exceeds the degree bound {bound}")]
    DegreeBoundExceeded { requested: i64, bound: i64 },
    #[error("coefficient {coefficient} of {context} is not p-integral")]
    IntegralityFailure { context: String, coefficient: String },
    #[error("ideal is not invariant: generator {generator} fails in degree {degree}")]
    NotInvariant { generator: String, degree: i64 },
    #[error("answer changed when padding was increased: {0}")]
    PaddingUnstable(String),
    #[error("test inconclusive below the degree bound: {0}")]
    Inconclusive(String),
    #[error("height mismatch: declared {declared}, computed {computed}")]
    HeightMismatch { declared: usize, computed: String },
    #[error("unsupported input class: {0}")]
    UnsupportedClass(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("local cohomology is not of region type at {0}")]
    RegionFitFailure(String),
    #[error("infinite graded piece: {0}")]
    InfiniteGradedPiece(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
