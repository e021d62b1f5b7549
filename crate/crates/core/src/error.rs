use thiserror::Error;

/// Errors raised by the rigidline library.
///
/// Negative verdicts (a framework that fails to certify, a flex search that
/// finds nothing) are not errors; they are returned as values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("point count mismatch: expected {expected}, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("stress has {got} entries but the graph has {expected} edges")]
    IndexMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("stress is identically zero")]
    ZeroStress,
    #[error("configuration spans {span} dimensions, need {ambient}")]
    DegenerateSpan { span: usize, ambient: usize },
    #[error("frameworks have different graphs")]
    GraphMismatch,
    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("projection directions are linearly dependent")]
    DependentDirections,
    #[error("positions are not strictly increasing")]
    NotIncreasing,
    #[error("perturbation would change the vertex order on the line")]
    OrderViolation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("circle centers coincide")]
    CoincidentCenters,
    #[error("circles do not intersect")]
    NoIntersection,
    #[error("degenerate pose: {0}")]
    Degenerate(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    /// A proof and a counter-witness disagree, or a theorem's hypotheses hold
    /// while its conclusion fails. Always a bug.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
