use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("profile has vanishing integral over the unit ball")]
    DegenerateProfile,
    #[error("closest-point projection is undefined at the interface center")]
    ProjectionAtCenter,
    #[error("Newton inverse map did not converge in {0} iterations")]
    InverseMapDiverged(usize),
    #[error("singular Jacobian in cell {0}")]
    SingularJacobian(usize),
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {residual:e}")]
    CgNotConverged { iterations: usize, residual: f64 },
    #[error("point lies outside the mesh: {0}")]
    PointOutsideMesh(String),
    #[error(
        "interface support reaches the domain boundary at level {level}: clearance {clearance} does not exceed eps*r0 + h0 = {required}"
    )]
    SupportViolation {
        level: u32,
        clearance: f64,
        required: f64,
    },
    #[error("error sequence contains a zero or non-finite value")]
    ZeroError,
    #[error("need at least {needed} levels, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("q must lie in (0, 1], got {0}")]
    InvalidExponent(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
