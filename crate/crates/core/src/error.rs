use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {what} (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nonpositive log argument {value:e} in {context}")]
    NonPositiveLogArgument { context: &'static str, value: f64 },

    #[error("conic solver reported an infeasible problem: {0}")]
    Infeasible(String),

    #[error("conic solver failed numerically: {0}")]
    NumericalFailure(String),

    #[error("rank residual {residual:e} exceeds threshold {threshold:e} ({context})")]
    RankResidual {
        context: &'static str,
        residual: f64,
        threshold: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failure budget exceeded: {failures} failures (budget {budget})")]
    FailureBudget { failures: usize, budget: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Prefixes solver messages with the block that produced them; other
    /// variants pass through unchanged.
    pub fn context(self, what: &str) -> Self {
        match self {
            Error::Infeasible(msg) => Error::Infeasible(format!("{what}: {msg}")),
            Error::NumericalFailure(msg) => Error::NumericalFailure(format!("{what}: {msg}")),
            other => other,
        }
    }
}
