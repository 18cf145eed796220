use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("log quotients decrease at index {index}")]
    NotLogConvex { index: usize },
    #[error("first quotient is below 1 (log quotient {log_mu1})")]
    NotNormalized { log_mu1: f64 },
    #[error("quotients show no divergence evidence within the horizon")]
    NotDivergent,
    #[error("horizon mismatch: {left} vs {right}")]
    HorizonMismatch { left: usize, right: usize },
    #[error("argument {arg} outside the valid range (bound {bound})")]
    DomainExceeded { arg: f64, bound: f64 },
    #[error("index {index} outside the materialized range (max {max})")]
    IndexExceeded { index: usize, max: usize },
    #[error("slope {slope} exceeds the largest available slope {max}")]
    SlopeExceeded { slope: f64, max: f64 },
    #[error("function is not convex")]
    NotConvex,
    #[error("slopes stay below 1; no principal part exists")]
    SlopeBounded,
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("quotients are not strictly increasing (index {index})")]
    NotStrictlyIncreasing { index: usize },
    #[error("not an N-function: {0}")]
    NotNFunction(String),
    #[error("incomplete condition reports: {0}")]
    IncompleteReports(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
