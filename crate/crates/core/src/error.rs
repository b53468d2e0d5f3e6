//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Polygon validation failures (orientation, convexity, quadrant, origin).
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    /// Weight-map validation failures in diagram construction.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// A face integral whose numerator exponent leaves the open Newton region.
    #[error("integral diverges: numerator exponent outside open Newton region")]
    DivergentIntegral,

    /// Adaptive refinement ran out of its evaluation budget. The best
    /// estimate obtained so far is attached.
    #[error("quadrature did not converge within {evaluations} evaluations (best estimate {value}, error bound {error_bound})")]
    QuadratureBudget {
        value: f64,
        error_bound: f64,
        evaluations: u64,
    },

    /// Truncation-tail estimate exceeded the requested tolerance.
    #[error("truncation tail too large: {0}")]
    TruncationTail(String),

    /// Internal cross-module consistency violation (indicates a bug).
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Bad slope-fit input.
    #[error("invalid slope-fit samples: {0}")]
    SlopeFit(String),

    /// Configuration file / CLI validation errors.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidPolygon(_)
            | Error::InvalidWeights(_)
            | Error::Config(_)
            | Error::SlopeFit(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::DivergentIntegral
            | Error::QuadratureBudget { .. }
            | Error::TruncationTail(_)
            | Error::Consistency(_) => 3,
        }
    }
}
