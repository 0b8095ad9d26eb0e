use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible tilt: {0}")]
    InfeasibleTilt(String),
    #[error("divergent moment: {0}")]
    DivergentMoment(String),
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    /// An event identity that must hold on every trajectory was violated.
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_prob_open(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} must lie in (0,1), got {p}"))
    }
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {x}"))
    }
}
