use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial must have degree at least 1")]
    DegreeTooLow,
    #[error("root finder did not converge for a degree {degree} polynomial (residual {residual:e})")]
    NonConvergence { degree: usize, residual: f64 },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("a rational map needs at least one term")]
    EmptyMap,
    #[error("residue of term {index} is zero")]
    ZeroResidue { index: usize },
    #[error("terms {first} and {second} share the same pole")]
    DuplicatePole { first: usize, second: usize },
    #[error("evaluation point lies on pole {index}")]
    PoleHit { index: usize },
    #[error("w = 0 has a preimage at infinity")]
    ZeroTarget,
    #[error("node count {0} must be a power of two in [64, 65536]")]
    InvalidNodeCount(usize),
    #[error("could not continue roots past t = {t}; try more nodes")]
    TrackingAmbiguity { t: f64 },
    #[error("expected {expected} boundary components, found {found}")]
    ComponentCountMismatch { expected: usize, found: usize },
    #[error("map is not n-good (critical-value margin {margin:e})")]
    NotGood { margin: f64 },
    #[error("basis order must be at least 1")]
    EmptyBasis,
    #[error("basis point {index} lies on the boundary")]
    BasisPointOnBoundary { index: usize },
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("amplitude {a} outside (0, {bound}) for degree {n}")]
    AmplitudeOutOfRange { n: usize, a: f64, bound: f64 },
    #[error("point lies on the slit")]
    OnSlit,
    #[error("invalid interval set: {0}")]
    InvalidIntervals(String),
    #[error("maps have different degrees ({0} and {1})")]
    DegreeMismatch(usize, usize),
    #[error("pole path collides at t = {t}")]
    PoleCollision { t: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
