use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tangent of norm {norm} reaches the cut locus (limit {limit})")]
    CutLocusExceeded { norm: f64, limit: f64 },
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("geodesic left the working region at x2 = {x2}")]
    LeftWorkingRegion { x2: f64 },
    #[error("geodesic shooting did not converge after {iterations} iterations (residual {residual:e})")]
    ShootingDiverged { iterations: usize, residual: f64 },
    #[error("field carries no usable localization metadata: {0}")]
    MissingMetadata(String),
    #[error("lambda = {lambda} violates lambda < 1/(2c) = {limit}")]
    LambdaTooLarge { lambda: f64, limit: f64 },
    #[error("parameter constraint violated: {0}")]
    ParamConstraintViolated(String),
    #[error("no feasible epsilon for q = {q}")]
    NoFeasibleEpsilon { q: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
