use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid initial condition: {0}")]
    InvalidInit(String),

    #[error("invalid stop condition: {0}")]
    InvalidStop(String),

    #[error("invalid pattern '{0}': patterns are nonempty strings over {{0,1}}")]
    InvalidPattern(String),

    #[error("jump rates violate the drift condition: {0}")]
    DriftCondition(String),

    #[error("domination precondition failed: {0}")]
    DominationPrecondition(String),

    #[error(
        "coupling order violated at site {site}: lower={lower}, upper={upper} ({context})"
    )]
    OrderViolation {
        site: usize,
        lower: f64,
        upper: f64,
        context: String,
    },

    #[error("truncation level {k} too small: bracket width {width:e} exceeds {target:e}")]
    TruncationTooSmall { k: usize, width: f64, target: f64 },

    #[error("all-ones configuration: single wrap-around cluster with no flanks")]
    WrapAroundCluster,

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
