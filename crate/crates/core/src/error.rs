use thiserror::Error;

/// Errors reported by model evaluation, kernels and integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("response diverges at zero frequency: {0}")]
    StaticDivergence(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("invalid dielectric model: {0}")]
    InvalidModel(String),
    #[error("field points coincide: the Green function is singular")]
    CoincidentPoints,
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("evaluation method not valid for this geometry: {0}")]
    MethodInvalid(String),
    #[error("zero-frequency limit not available: {0}")]
    UnsupportedStaticLimit(String),
    #[error("derivative order {0} per argument is not supported")]
    OrderUnsupported(usize),
    #[error("distance range too narrow for a power-law fit: {0}")]
    RangeTooNarrow(String),
    #[error("charge site at z = {0} m is not above the surface")]
    SiteBelowSurface(f64),
    #[error("mode frequencies are not separated from the damping: {0}")]
    DegenerateModes(String),
    #[error("time integration failed: {0}")]
    IntegratorFailure(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
