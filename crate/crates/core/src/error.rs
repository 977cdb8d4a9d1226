use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty sequence")]
    EmptySequence,

    #[error("state space too large: {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: usize },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("chain not irreducible")]
    NotIrreducible,

    #[error("chain not aperiodic (period {0})")]
    NotAperiodic(u64),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("truncation cap exceeded: residual tail mass {residual:e} after {terms} terms")]
    TruncationCap { residual: f64, terms: usize },

    #[error("undefined pair: input {0} compared with itself")]
    UndefinedPair(usize),

    #[error("ambiguous collapse: run collapsing requires a no-self-loop source")]
    AmbiguousCollapse,

    #[error("trace too long: {len} symbols exceeds the sample budget {budget}")]
    TraceTooLong { len: u64, budget: u64 },

    #[error("inconsistent window: every candidate has zero likelihood")]
    InconsistentWindow,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
