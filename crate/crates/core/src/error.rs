use thiserror::Error;

use crate::variational::Minimizer;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("ambiguous monotonicity pattern: {changes} direction changes in s_2..s_{k_max}")]
    AmbiguousPattern { changes: usize, k_max: u64 },

    #[error("no interior root of p(x; k={k}) in ({k}, {k_plus_one})", k_plus_one = k + 1)]
    NoInteriorRoot { k: u64 },

    #[error("complexity guard: {blocks}^{s} block tuples exceeds 1e8")]
    TooManyTuples { blocks: usize, s: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parameter point not covered by any classification rule ({})", .0.reason)]
    Unclassified(Box<Unclassified>),
}

/// Parameter point that falls through every classification rule. The numeric
/// answer from the grid oracle is still attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Unclassified {
    pub reason: String,
    pub segment: Option<u64>,
    pub oracle: Minimizer,
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
