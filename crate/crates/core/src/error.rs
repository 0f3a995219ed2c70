use thiserror::Error;

/// Library-wide error type. Numerical routines return `ToleranceNotMet` rather
/// than silently degrading, so callers can distinguish "converged" from "best
/// effort" results.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid dimension n = {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("point does not live on this manifold kind (expected {expected})")]
    ManifoldMismatch { expected: &'static str },

    #[error("point at flat-chart distance {rho:.6} is outside the conformal chart (limit {limit:.6})")]
    OutOfChart { rho: f64, limit: f64 },

    #[error(
        "quadrature tolerance not met: estimate {estimate:.17e}, error bound {error:.3e}, requested {requested:.3e}"
    )]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    #[error("field symmetry {tag} is not integrable on {manifold}; supply a zonal or product-bi-symmetric field")]
    UnsupportedSymmetry {
        tag: &'static str,
        manifold: &'static str,
    },

    #[error("regime {regime} is not defined for n = {n}")]
    RegimeDimension { regime: &'static str, n: usize },

    #[error("rate fit rejected: {reason}")]
    DegenerateFit { reason: String },

    #[error("no interior minimizer: effective coefficient {coefficient:.6e} is not positive")]
    NoInteriorMinimum { coefficient: f64 },

    #[error("config parse error at line {line}: {reason}")]
    ConfigParse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
