use thiserror::Error;

/// Errors raised by the geometry kernels, the oracle and the CLI front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    /// A point (or a finite-difference stencil point) left the chart domain.
    #[error("point outside chart domain: {0}")]
    Domain(String),
    /// A non-finite value appeared in an intermediate quantity.
    #[error("non-finite value: {0}")]
    Numeric(String),
    /// Metric not positive-definite, singular, or similar.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Seed vectors for a frame were linearly dependent.
    #[error("rank deficiency: {0}")]
    Rank(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// An operation was called outside the regime where its formula holds.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Config(String),
    /// Geodesic integration produced a non-finite state after `steps` steps.
    #[error("integration diverged after {steps} steps")]
    Divergence { steps: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;

impl From<std::io::Error> for GeoError {
    fn from(e: std::io::Error) -> Self {
        GeoError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GeoError {
    fn from(e: serde_json::Error) -> Self {
        GeoError::Config(e.to_string())
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GeoError::Numeric(what.to_string()))
    }
}
