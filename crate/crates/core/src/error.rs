use thiserror::Error;

/// Errors produced by the geometric and combinatorial operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points belong to different geometries")]
    MixedGeometry,
    #[error("zero tangent vector")]
    ZeroVector,
    #[error("point is off the model surface (defect {0:e})")]
    OffManifold(f64),
    #[error("vector is not tangent at its base point (defect {0:e})")]
    NotTangent(f64),
    #[error("bad radius {0}")]
    BadRadius(f64),
    #[error("degenerate velocity at t = {0}")]
    DegenerateVelocity(f64),
    #[error("geodesic from t = {0} does not meet the curve again")]
    NoIntersection(f64),
    #[error("launch angle {0} is too close to tangential")]
    Tangential(f64),
    #[error("chord endpoints coincide")]
    CoincidentPoints,
    #[error("curve or polygon is not convex")]
    NotConvex,
    #[error("curve does not close (defect {0:e})")]
    NotClosed(f64),
    #[error("periodic function contains a first harmonic")]
    FirstHarmonic,
    #[error("angle {alpha} is not admissible for harmonic k = {k} (residual {residual:e})")]
    NotAdmissible { k: u32, alpha: f64, residual: f64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("polygon vertices are clockwise")]
    WrongOrientation,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parameters leave the positive region (min side {0})")]
    Infeasible(f64),
    #[error("n = {n} and k - 1 = {km1} are coprime; only the regular polygon exists")]
    CoprimePair { n: usize, km1: usize },
    #[error("arcs sum to {got}, expected {expected}")]
    ArcSumMismatch { got: f64, expected: f64 },
    #[error("arc {0} is not positive")]
    NonPositiveArc(f64),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
