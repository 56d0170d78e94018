//! Generalised α-Lüroth expansions: rational approximation coefficients θ_n,
//! their limit distribution F_ε and expected average M_ε, and the structure
//! (interval union vs. Cantor set) and fractal dimensions of the set 𝓜 of
//! attainable averages.
//!
//! A partition of \[0,1\] into intervals A_n = (t_{n+1}, t_n\] plus a sign
//! sequence ε ∈ {0,1}^ℕ defines a piecewise-linear expansion map; iterating
//! it produces digit sequences, convergents p_n/q_n and the coefficients
//! θ_n = q_n·|x − p_n/q_n|. Everything downstream — the closed-form CDF, the
//! expected averages, the interval tree behind 𝓜 — is computed with certified
//! truncation enclosures, exactly (in ℚ + ℚ·π²) for the built-in generators.

mod bounded;
mod distribution;
mod dynamics;
mod error;
pub mod exact;
pub mod exec;
mod mset;
mod partition;
mod signs;

pub use bounded::{Bounded, SignClass};
pub use distribution::{
    cdf, empirical_cdf, f_term, g_term, g_term_exact, gap, gap_exact, interval_length,
    interval_length_exact, m_term, m_term_exact, mean_theta, mean_theta_exact, unit_grid, GapValue,
};
pub use dynamics::{apply_map, expand, theta_identity_check, Digit, ExpansionTrace, Step};
pub use error::{Error, Result};
pub use mset::{
    classify, dimensions, interval, mset_approx, Classification, ConditionCheck, DimensionPoint,
    Endpoint, Evidence, GoldenRatioCheck, LabeledInterval, MergedInterval, MsetApprox,
    TailCertificate, Verdict,
};
pub use partition::{Generator, Partition, PartitionConfig, RationalConfig, TailStats};
pub use signs::{SignSpec, SignTail, Word};
