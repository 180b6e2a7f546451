//! Error type shared by every numerical routine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("subextremal condition violated: 9 M^2 Lambda = {0}")]
    SubextremalViolation(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("spacelike margin violated at r = {r}: gap {gap}")]
    SpacelikeViolation { r: f64, gap: f64 },
    #[error("shooting failed: {0}")]
    ShootingFailure(String),
    #[error("star surface not timelike: |dz/dt| = {0}")]
    TimelikeViolation(f64),
    #[error("extrapolation did not stabilise: {0}")]
    ExtrapolationFailure(String),
    #[error("CFL violated: dt = {dt}, limit = {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("domain too small for causality padding: need {need}, have {have}")]
    DomainTooSmall { need: f64, have: f64 },
    #[error("boundary speed {0} is not below 1")]
    BoundarySpeedViolation(f64),
    #[error("radiation extraction inconsistent: relative difference {0}")]
    ExtractionInconsistent(f64),
    #[error("fit rejected: {0}")]
    FitRejected(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("grid cannot resolve scale {0}")]
    ResolutionInsufficient(f64),
    #[error("operator is singular: {0}")]
    SingularOperator(String),
    #[error("series not converged: {0}")]
    SeriesNotConverged(String),
    #[error("quadrature not converged: {0}")]
    QuadratureNotConverged(String),
    #[error("positivity gate failed: min V = {0}")]
    PositivityGateFailed(f64),
}

pub type Result<T> = std::result::Result<T, LabError>;
