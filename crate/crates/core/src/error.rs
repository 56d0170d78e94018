//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Partition data that violates the defining invariants (t_1 = 1,
    /// strict decrease, ratios in (0,1)).
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// An argument outside the documented domain of an operation.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// The requested truncation tolerance cannot be certified with the
    /// index range this partition supports.
    #[error("tolerance {tol:e} not reachable: {detail}")]
    TolUnreachable { tol: f64, detail: String },

    /// Operation refused because the structural verdict does not permit it
    /// (e.g. fractal dimensions of a finite interval union).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Malformed textual input (sign-sequence syntax, rationals, config files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
