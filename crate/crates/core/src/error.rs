use thiserror::Error;

/// Errors raised by the calculator and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("root finding failed: {0}")]
    NoConvergence(String),
    #[error("assumption ({name}) failed: {detail}")]
    Assumption { name: String, detail: String },
    #[error("numerical abort: {0}")]
    NumericalAbort(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(domain(format!("{name} must be finite, got {x}")))
    }
}
