use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid residue class q={q}, r={r}: {reason}")]
    InvalidClass { q: u64, r: u64, reason: &'static str },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("sieve budget exceeded: {requested} numbers requested, budget is {budget}")]
    Budget { requested: u64, budget: u64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("empty sample")]
    EmptySample,

    #[error("insufficient sample: {got} values, at least {need} required")]
    InsufficientSample { got: usize, need: usize },

    /// Iterative fit did not converge; `last` is the final iterate.
    #[error("{what} did not converge after {iterations} iterations (last iterate {last})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last: f64,
    },

    #[error("cache format error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
