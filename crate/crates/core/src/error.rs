use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage names used when a summation or classification aborts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    CoefficientClass,
    Continuation,
    GrowthFit,
    Direction,
    Laplace,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::CoefficientClass => "coefficient-class",
            Stage::Continuation => "continuation",
            Stage::GrowthFit => "growth-fit",
            Stage::Direction => "direction",
            Stage::Laplace => "laplace",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("table depth insufficient: {0}")]
    DepthInsufficient(String),

    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },

    #[error("quadrature did not converge ({what}): estimate {estimate:e}, error {error:e}")]
    Quadrature {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("precondition violated: {0}")]
    Domain(String),

    #[error("non-finite result: {0}")]
    NonFinite(String),

    #[error("{stage} stage failed: {detail}")]
    Stage { stage: Stage, detail: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn depth(msg: impl Into<String>) -> Self {
        Error::DepthInsufficient(msg.into())
    }

    pub(crate) fn stage(stage: Stage, detail: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            detail: detail.into(),
        }
    }
}
