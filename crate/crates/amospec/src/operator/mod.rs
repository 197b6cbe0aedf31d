//! The almost Mathieu operator and its finite-window machinery.
//!
//! The operator acts on two-sided sequences by
//! `(Hu)(n) = u(n+1) + u(n-1) + 2 lambda cos(2 pi (theta + n alpha)) u(n)`.
//! This module provides transfer-matrix products and Lyapunov exponents,
//! window determinants `P_k` with Cramer-rule Green function entries,
//! regularity and eps-uniformity predicates, resonance classification for
//! integer sites against the convergent denominators of `alpha`, and the
//! decay-window check for eigenfunction profiles.
//!
//! All orbit phases `theta + k alpha mod 1` are reduced through the exact
//! big-rational machinery of [`crate::arith`]; float accumulation over long
//! orbits would drift past resonance scales. Growing quantities (transfer
//! products, determinants, solution values) are carried in renormalized
//! log form because entries grow like `e^{L k}` and overflow doubles near
//! `k = 700 / L`.

mod amo;
mod dense;
mod det;
mod profile;
mod resonance;
mod transfer;
mod uniformity;

pub use amo::AlmostMathieu;
pub use dense::{dense_det_log, dense_inverse_entry, dense_solve, window_matrix};
pub use det::{green_entry, pk_det, regularity_check, PkDet};
pub use profile::{
    decay_window_check, decay_window_check_with_slack, log_norm_sq_l1l2, norm_l1l2,
    solution_profile, wronskian_det, DecayOutcome, DecayReport, SolutionProfile,
};
pub use resonance::{classify_resonance, default_t1, default_t2, ResonanceKind, ResonanceVerdict};
pub use transfer::{lyapunov, transfer_product, LyapunovEstimate, TransferProduct};
pub use uniformity::uniformity_check;

use thiserror::Error;

/// Errors from operator-window computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    /// Coupling constant is negative or not finite.
    #[error("coupling lambda must be finite and nonnegative, got {lambda}")]
    BadCoupling { lambda: f64 },
    /// An energy, phase, or rate argument is not a finite number.
    #[error("argument {name} must be finite, got {value}")]
    NonfiniteArgument { name: &'static str, value: f64 },
    /// Requested step count exceeds the supported orbit length.
    #[error("step count {k} exceeds the 10^8 orbit limit")]
    StepLimit { k: i64 },
    /// Too few steps for a meaningful Birkhoff average.
    #[error("lyapunov averaging needs at least 1000 steps, got {n_steps}")]
    TooFewSteps { n_steps: i64 },
    /// A window determinant vanished where a Green ratio needs it.
    #[error("E is an eigenvalue of the restriction to the window")]
    EigenvalueHit,
    /// Regularity scan asked for a window shorter than the k/5 margin allows.
    #[error("window too small for k/5 margin: k = {k} < 10")]
    WindowTooSmall { k: i64 },
    /// Two nodes share the same cosine value.
    #[error("degenerate node set: cos values at indices {i} and {j} coincide")]
    DegenerateNodes { i: usize, j: usize },
    /// Node count does not match the requested degree.
    #[error("uniformity check needs k+1 = {need} nodes, got {got}")]
    BadNodeCount { need: usize, got: usize },
    /// Resonance exponent outside the open unit interval.
    #[error("t2 must lie in (0,1), got {t2}")]
    T2OutOfRange { t2: f64 },
    /// The frequency expansion does not reach the requested scale index.
    #[error("frequency has {have} convergents, scale index {need} unavailable")]
    MissingConvergents { need: usize, have: usize },
    /// Nonresonant classification has no admissible n0 at this distance.
    #[error("no admissible n0: dist(k, q_n Z) = {dist} is below 4 q_0")]
    ResonanceUndefined { dist: i64 },
    /// A profile or norm window does not cover the sites a computation needs.
    #[error("window [{have_lo}, {have_hi}] does not cover required [{need_lo}, {need_hi}]")]
    WindowDoesNotCover {
        need_lo: i64,
        need_hi: i64,
        have_lo: i64,
        have_hi: i64,
    },
    /// Invalid site ordering for a Green entry request.
    #[error("need x1 <= y <= x2, got x1 = {x1}, y = {y}, x2 = {x2}")]
    BadGreenSites { x1: i64, y: i64, x2: i64 },
    /// Determinant order must be at least 1.
    #[error("determinant order k must be >= 1, got {k}")]
    BadDetOrder { k: i64 },
    /// Norm cutoffs must be nonnegative.
    #[error("norm cutoffs must be finite and nonnegative, got L1 = {l1}, L2 = {l2}")]
    BadNormCutoffs { l1: f64, l2: f64 },
    /// Decay exponents must satisfy 0 < t1 < t2 < 1.
    #[error("need 0 < t1 < t2 < 1, got t1 = {t1}, t2 = {t2}")]
    BadDecayExponents { t1: f64, t2: f64 },
    /// The decay rate ln(lambda) - (1 - t1) beta is not positive.
    #[error("nonpositive decay rate: ln lambda = {log_lambda} <= (1-t1) beta = {discount}")]
    NonpositiveRate { log_lambda: f64, discount: f64 },
    /// Profile values must be finite with at least one nonzero entry.
    #[error("profile values must be finite and not identically zero")]
    BadProfileValues,
}
