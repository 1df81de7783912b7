use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfiError {
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("function is not normalized: integral = {integral} (tolerance {tolerance})")]
    Normalization { integral: f64, tolerance: f64 },

    #[error("invalid density: value {value} at x = {x}")]
    InvalidDensity { x: f64, value: f64 },

    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("value out of floating-point range: {0}")]
    Range(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("grid does not cover the requested states: {0}")]
    DomainCoverage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical contract violated: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, MfiError>;
