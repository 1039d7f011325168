use thiserror::Error;

/// Errors raised by measure construction, transforms and the asymptotic checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not certify the sign pattern on [{lo}, {hi}]")]
    SignChangeIsolation { lo: f64, hi: f64 },

    #[error("density is not representable in the term grammar: {0}")]
    UnrepresentableDensity(String),

    #[error("Laplace transform diverges at lambda = {lambda}")]
    DivergentTransform { lambda: f64 },

    #[error("transform changes sign near the origin (tau = {tau})")]
    SignChangeNearZero { tau: f64 },

    #[error("distribution function changes sign near infinity (t = {t})")]
    SignChangeNearInfinity { t: f64 },

    #[error("transform vanishes at index n = {n}")]
    ZeroTransform { n: u64 },

    #[error("overlapping density segments at [{lo}, {hi})")]
    OverlappingSegments { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
