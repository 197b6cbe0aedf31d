//! Finite-volume spectral data for the operator: a symmetric-tridiagonal
//! eigensolver, spectral measures of site vectors, half-line m-functions
//! with their algebraic identities, and the subordinacy quantities
//! a(L), b(L), omega(L) with the L(eps) root solve.
//!
//! Everything here reduces to one audited eigensolver: m-functions are
//! Borel sums over truncation spectral data (never resolvent recursions),
//! which makes the Herglotz property automatic, and subordinacy norms are
//! quadratic forms in the two basis solutions, evaluated in log-scaled
//! form so hyperbolic growth never overflows.

mod measure;
mod mfun;
mod subord;
mod tridiag;

pub use measure::spectral_measure;
pub use mfun::{
    boundary_scaling_check, free_m, half_line_m, BoundaryScalingReport, MFunctionPair,
    MFunctionSolver,
};
pub use subord::{
    boundary_phase_proxy, find_L_of_eps, jl_lower_bound_check, norm_growth_check,
    omega_sq_brute_force, subordinacy_quantities, JlBound, NormGrowthPoint, NormGrowthReport,
    SubordinacyData,
};
pub use tridiag::{
    all_eigenvalues, eigensolve, eigenvector_at, SpectralData, TruncatedOperator,
};

// The Borel transform of a spectral measure lives with the measure layer;
// re-exported here because M_1 and M_2 are assembled from it.
pub use crate::measure::borel_transform;

use crate::operator::OperatorError;
use thiserror::Error;

/// Errors from spectral computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// Truncation window is empty or inverted.
    #[error("window [{lo}, {hi}] is empty or inverted")]
    BadWindow { lo: i64, hi: i64 },
    /// Truncation size exceeds the eigensolver cap.
    #[error("truncation size {size} exceeds the eigensolver cap {cap}")]
    SizeCap { size: usize, cap: usize },
    /// A requested site lies outside the truncation window.
    #[error("site {site} lies outside the window [{lo}, {hi}]")]
    SiteOutsideWindow { site: i64, lo: i64, hi: i64 },
    /// Site amplitudes were not stored for this site at eigensolve time.
    #[error("no amplitudes stored for site {site}; request it at eigensolve time")]
    MissingSite { site: i64 },
    /// A coefficient vector is empty or identically zero.
    #[error("coefficient vector {name} is empty or identically zero")]
    DegenerateVector { name: &'static str },
    /// An argument is not a finite number.
    #[error("argument {name} must be finite, got {value}")]
    NonfiniteArgument { name: &'static str, value: f64 },
    /// z must lie in the open upper half plane.
    #[error("need Im z > 0, got Im z = {im}")]
    NotUpperHalfPlane { im: f64 },
    /// The truncation cannot resolve this eps.
    #[error(
        "truncation N = {n} cannot resolve eps = {eps}: estimated truncation error \
         {estimate:e} exceeds tolerance; increase N to at least {suggested_n}"
    )]
    EpsilonTooSmall {
        n: i64,
        eps: f64,
        estimate: f64,
        suggested_n: i64,
    },
    /// 1/eps is already below omega(2), so omega(L) = 1/eps has no root L >= 2.
    #[error("epsilon too large: 1/eps = {inv_eps} is below omega(2) = {omega_at_2}")]
    EpsilonTooLarge { inv_eps: f64, omega_at_2: f64 },
    /// Subordinacy norms need a window of at least two sites.
    #[error("subordinacy quantities need L >= 2, got {l}")]
    LTooSmall { l: f64 },
    /// omega(L) never reached 1/eps below the search cap.
    #[error("omega(L) did not reach 1/eps below the L = {l_cap} search cap")]
    BracketFailure { l_cap: f64 },
    /// Boundary-scaling exponent outside the admissible range.
    #[error("scaling exponent t = {t} outside the admissible [0, {max})")]
    TOutOfRange { t: f64, max: f64 },
    /// The frequency expansion is too short to furnish a beta estimate.
    #[error("frequency too short to estimate beta")]
    BetaUnavailable,
    /// Norm growth exponents are only defined for supercritical coupling.
    #[error("norm growth exponent needs coupling > 1, got log lambda = {log_lambda}")]
    NotHyperbolic { log_lambda: f64 },
    /// An input collection that must be nonempty is empty.
    #[error("input {name} must be nonempty")]
    EmptyInput { name: &'static str },
    /// Supplied eigenvalue list does not belong to this truncation.
    #[error("eigenvalue list length {got} does not match window size {want}")]
    EigenListMismatch { got: usize, want: usize },
    /// Eigenvalue index outside the truncation's range.
    #[error("eigenvector index {k} outside the {n} eigenvalues of the window")]
    EigenIndex { k: usize, n: usize },
    /// Propagated error from operator-level machinery.
    #[error(transparent)]
    Operator(#[from] OperatorError),
    /// Propagated error from measure construction.
    #[error(transparent)]
    Measure(#[from] crate::measure::MeasureError),
}
