use crate::certificate::Certificate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid model space: {0}")]
    InvalidSpace(String),

    #[error("points or vectors belong to different model spaces")]
    SpaceMismatch,

    #[error("ambient vector has length {found}, expected {expected}")]
    AmbientLength { expected: usize, found: usize },

    #[error("point is off the model surface (residual {residual:e})")]
    OffSurface { residual: f64 },

    #[error("vector is not tangent at its base point (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("tangent vector of length {length} reaches the injectivity radius {limit}")]
    BeyondInjectivityRadius { length: f64, limit: f64 },

    #[error("points are (numerically) antipodal; the logarithm is undefined")]
    Antipodal,

    #[error("angle is undefined for a zero-length leg")]
    DegenerateLeg,

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("measure has no support points")]
    EmptyMeasure,

    #[error("{points} points but {weights} weights")]
    LengthMismatch { points: usize, weights: usize },

    #[error("total mass {0:e} is too close to zero to normalize")]
    ZeroMass(f64),

    #[error("edge lengths are not realizable by a Euclidean simplex: {0}")]
    NotRealizable(String),

    #[error("simplex is degenerate")]
    DegenerateSimplex,

    #[error("certificate `{}` failed (margin {:e})", .0.failing_component(), .0.margin)]
    CertificateFailed(Box<Certificate>),

    #[error("solver did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    MaxIterations { iterations: usize, gradient_norm: f64 },

    #[error("solver step size collapsed at iteration {iteration}")]
    StepCollapsed { iteration: usize },

    #[error("parameter point lies outside the chart domain (distance {distance}, radius {radius})")]
    OutsideDomain { distance: f64, radius: f64 },

    #[error("stationarity system is singular (condition estimate {0:e})")]
    SingularSystem(f64),

    #[error("only dimensions up to 3 are supported, got {0}")]
    DimensionTooLarge(usize),
}
