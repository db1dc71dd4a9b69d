use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial order {order} exceeds the cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invariant spectrum is unbounded below: {0}")]
    UnboundedSpectrum(String),

    #[error("no classically allowed region (discriminant {0:e})")]
    NoClassicalRegion(f64),

    #[error("eigenvalue bracketing failed: {0}")]
    Bracketing(String),

    #[error("xi = {xi} lies inside the turning-point exclusion zone around {turning_point}")]
    TurningPointSingular { xi: f64, turning_point: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degenerate unperturbed levels {0} and {1}")]
    Degenerate(usize, usize),

    #[error("method {0} is not available for this model")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
