use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid bundle: {0}")]
    InvalidSpec(String),
    #[error("Fano condition violated: sum of twists {sum} exceeds s = {s}")]
    FanoViolation { sum: i64, s: i64 },
    #[error("twist a_{index} = {value} is negative")]
    NegativeTwist { index: usize, value: i64 },
    #[error("twists must be ascending (a_{index} exceeds the next twist)")]
    Unsorted { index: usize },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("coordinate {index} is zero")]
    ZeroCoordinate { index: usize },
    #[error("coefficient {index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("lift is degenerate: coordinate {index} vanishes")]
    DegenerateLift { index: usize },
    #[error("non-generic parameter: found {found} isolated critical points, expected {expected}")]
    NonGenericParameter { found: usize, expected: usize },
    #[error("Newton iteration diverged for point {index} (residual {residual:e})")]
    NewtonDivergence { index: usize, residual: f64 },
    #[error("path collision at tau = {tau} (points {first} and {second})")]
    PathCollision { tau: f64, first: usize, second: usize },
    #[error("start set does not lie over the path's base point")]
    BasepointMismatch,
    #[error("ambiguous endpoint match for point {index} (distance ratio {ratio:.3})")]
    AmbiguousMatch { index: usize, ratio: f64 },
    #[error("label assignment failed: {0}")]
    LabelAmbiguity(String),
    #[error("limit grid has coinciding points")]
    GridDegenerate,
}
