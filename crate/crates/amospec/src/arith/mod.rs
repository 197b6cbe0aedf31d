//! Exact continued-fraction arithmetic for irrational rotation numbers.
//!
//! The frequency alpha of the almost Mathieu operator enters every resonance
//! estimate through its continued-fraction denominators q_n, which grow like
//! e^{beta q_{n-1}} and leave float range almost immediately. Everything here
//! is therefore big-integer exact: convergents, orbit phases k*alpha mod 1,
//! and small-denominator distances. Floats appear only in reported summaries
//! (beta estimates, margins).

mod cf;
mod freq;
mod synth;

pub use cf::{big_ln, BetaEstimate};
pub use freq::{DiophantineParams, DiophantineReport, Frequency, FrequencyRepr};

use thiserror::Error;

/// Errors from frequency construction and estimation.
#[derive(Debug, Error)]
pub enum ArithError {
    /// The input was exactly rational and its expansion terminated.
    #[error("rational input: continued fraction terminates after {terms} terms")]
    RationalInput { terms: usize },
    /// Synthesis could not fit enough scales under the denominator cap.
    #[error("insufficient scales: only {scales} ratio scales fit under q_cap {q_cap}, need 3")]
    InsufficientScales { scales: usize, q_cap: u64 },
    /// An estimator needed more convergents than the frequency carries.
    #[error("too few convergents: have {have}, need at least {need}")]
    TooFewConvergents { have: usize, need: usize },
    /// Input value outside the open unit interval.
    #[error("alpha must lie strictly inside (0,1)")]
    AlphaOutOfRange,
    /// Unparseable decimal literal.
    #[error("invalid decimal literal: {reason}")]
    BadDecimal { reason: String },
    /// Synthesis target invalid.
    #[error("beta_target must be nonnegative and finite")]
    BadBetaTarget,
    /// n_max or another count parameter invalid.
    #[error("{what} must be at least {min}")]
    CountTooSmall { what: &'static str, min: usize },
}
