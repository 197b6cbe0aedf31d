//! Discrete Borel measures and their dimension machinery.
//!
//! A measure is a finite list of weighted atoms. On top of it sit the three
//! scaling quantities the dimension theory runs on:
//!
//! * concentration mu([x-eps, x+eps]) with exponents gamma^-(x), gamma^+(x)
//!   (liminf/limsup of ln mu([x-eps,x+eps]) / ln eps),
//! * the m-Borel transform J_{mu,m}(x,eps) = sum_i w_i / (1 + (|x-y_i|/eps)^m)
//!   with its scaling exponent sigma,
//! * Renyi sums S_mu(q,eps) = sum_j mu([j eps, (j+1) eps))^q with the
//!   multifractal dimensions D^{+/-}(q).
//!
//! Finite grids replace the eps -> 0 limits: liminf/limsup are proxied by
//! min/max of per-scale ratios over the tail half of a scale grid. The
//! closed-form bounds tying the three quantities together live in [`bounds`].

mod borel;
mod bounds;
mod discrete;
mod renyi;
mod report;
mod scaling;

pub use borel::{borel_transform, m_borel};
pub use bounds::{bound_case2_packing, bound_thm12_multifractal, bound_thm_gamma_plus};
pub use discrete::DiscreteMeasure;
pub use renyi::{multifractal_dims, renyi_sum, MultifractalEstimate};
pub use report::{
    dimension_report, theorem_suite_check, DimensionReport, MeasureCheck, MomentSigmaCheck,
    PointCheck, SamplePointReport, SigmaSummary, SuiteCheckReport,
};
pub use scaling::{gamma_exponents, j_scaling_exponent, ScaleGrid, ScalingEstimate, SigmaEstimate};

use thiserror::Error;

/// Errors from measure construction and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    /// Operations on an empty atom list.
    #[error("measure has no atoms")]
    EmptyMeasure,
    /// A weight was zero or negative.
    #[error("weight at index {index} is not strictly positive")]
    NonpositiveWeight { index: usize },
    /// A position or weight was NaN or infinite.
    #[error("non-finite position or weight at index {index}")]
    NonfiniteValue { index: usize },
    /// Scale grids need at least four scales.
    #[error("scale grid needs at least 4 strictly decreasing positive scales, got {len}")]
    GridTooSmall { len: usize },
    /// Scale grid values out of order or not positive.
    #[error("scale grid values must be strictly decreasing, positive, and finite")]
    GridNotDecreasing,
    /// Cantor construction depth outside 1..=20.
    #[error("cantor depth {depth} outside the supported range 1..=20")]
    DepthOutOfRange { depth: usize },
    /// Left weight of the Cantor construction outside (0,1).
    #[error("cantor left weight must lie strictly inside (0,1)")]
    WeightOutOfRange,
    /// Every grid scale had zero mass around the point.
    #[error("mu([x-eps, x+eps]) vanishes at every grid scale")]
    AllScalesEmpty,
    /// No usable scales remain in the tail half after exclusions.
    #[error("no usable scales in the tail half of the grid")]
    TailEmpty,
    /// Multifractal dimensions require q > 1.
    #[error("multifractal dimension requires q > 1, got {q}")]
    QOutOfRange { q: f64 },
    /// The gamma-plus bound formula needs m > sigma.
    #[error("hypothesis m>\u{3c2} violated: m = {m}, sigma = {sigma}")]
    MSigmaViolated { m: f64, sigma: f64 },
    /// Bound formula arguments outside the theorem's regime.
    #[error("out of regime: {what}")]
    OutOfRegime { what: String },
    /// Sampling requires at least one point.
    #[error("n_samples must be at least 1")]
    BadSampleCount,
}
