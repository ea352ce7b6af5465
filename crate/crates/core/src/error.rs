use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("domain has empty interior")]
    EmptyInterior,

    #[error("point is not in the interior of the domain")]
    PointNotInterior,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} is not supported in dimension {dimension}")]
    UnsupportedDimension { dimension: usize, what: &'static str },

    #[error("operation requires a convex domain")]
    NonConvexDomain,

    #[error("boundary normals are unavailable for this domain")]
    NormalsUnavailable,

    #[error("hessian is unavailable for this domain")]
    HessianUnavailable,

    #[error("non-finite integrand sample at node {index}")]
    NonFiniteSample { index: usize },

    #[error("finite-difference stencil of radius {step} leaves the domain")]
    StepExitsDomain { step: f64 },

    #[error("point is {distance:e} from the boundary, below the guard {guard:e}")]
    TooCloseToBoundary { distance: f64, guard: f64 },

    #[error("invalid functional profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radius {0} lies outside every ring")]
    RadiusOutsideRings(f64),

    #[error("could not certify the sign of the radial derivative on ring {ring} (truncation too small)")]
    BracketSignFailure { ring: usize },

    #[error("no convergence after {0} iterations")]
    MaxIterations(usize),

    #[error("line search stalled at iteration {iteration}")]
    LineSearchStall { iteration: usize },

    #[error("multi-start minimizers disagree by {disagreement:e} (tolerance {tolerance:e})")]
    DisagreementExceedsTolerance { disagreement: f64, tolerance: f64 },

    #[error("cutoff radius {r_out} does not enclose the domain (needs at least {required})")]
    CutoffTooSmall { r_out: f64, required: f64 },
}
