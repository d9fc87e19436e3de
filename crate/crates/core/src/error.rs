use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("comparator is not nondecreasing in the population loss above alpha = {alpha}")]
    NonMonotone { alpha: f64 },

    #[error("no finite bound: {0}")]
    NoFiniteBound(String),

    #[error("correction is divergent: {0}")]
    CorrectionDivergent(String),

    #[error("infeasible query: comparator at (alpha, alpha) is {value} > budget {budget}")]
    Infeasible { value: f64, budget: f64 },

    #[error("convex conjugate diverges at q = {q}")]
    Divergent { q: f64 },

    #[error("non-finite comparator value at (q = {q}, p = {p})")]
    NonFinite { q: f64, p: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
