//! Scale grids and the pointwise scaling-exponent estimators.
//!
//! The eps -> 0 limits defining gamma^-(x), gamma^+(x) and the m-Borel
//! exponents are proxied on a finite grid of scales: liminf and limsup become
//! min and max of the per-scale ratios over the *tail half* of the grid (the
//! smallest scales), with a least-squares slope reported alongside. With
//! ln eps < 0, a liminf of quotients maps to a max over ratios for the J
//! exponent and to a min for the concentration exponent.

use serde::{Deserialize, Serialize};

use super::{m_borel, DiscreteMeasure, MeasureError};
use crate::scalar::Real;

/// A strictly decreasing grid of scales standing in for eps -> 0+.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleGrid<F> {
    eps_values: Vec<F>,
}

impl<F: Real> ScaleGrid<F> {
    /// Builds a grid from explicit scale values; they must be finite,
    /// positive, strictly decreasing, and at least four.
    pub fn from_values(eps_values: Vec<F>) -> Result<Self, MeasureError> {
        if eps_values.len() < 4 {
            return Err(MeasureError::GridTooSmall {
                len: eps_values.len(),
            });
        }
        for (i, &e) in eps_values.iter().enumerate() {
            if !(e.is_finite() && e > F::zero()) {
                return Err(MeasureError::GridNotDecreasing);
            }
            if i > 0 && e >= eps_values[i - 1] {
                return Err(MeasureError::GridNotDecreasing);
            }
        }
        Ok(Self { eps_values })
    }

    /// Geometric grid eps_j = base^{-j} for j = j_min ..= j_max; base > 1.
    pub fn from_base_powers(base: F, j_min: u32, j_max: u32) -> Result<Self, MeasureError> {
        if !(base.is_finite() && base > F::one()) {
            return Err(MeasureError::GridNotDecreasing);
        }
        if j_max < j_min || (j_max - j_min) < 3 {
            return Err(MeasureError::GridTooSmall {
                len: (j_max as i64 - j_min as i64 + 1).max(0) as usize,
            });
        }
        let values = (j_min..=j_max)
            .map(|j| base.powi(-(j as i32)))
            .collect();
        Self::from_values(values)
    }

    /// The scales, strictly decreasing.
    #[must_use]
    pub fn eps_values(&self) -> &[F] {
        &self.eps_values
    }

    /// Number of scales.
    #[must_use]
    pub fn len(&self) -> usize {
        self.eps_values.len()
    }

    /// Grids are never empty by construction.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.eps_values.is_empty()
    }

    /// First index of the tail half (the smaller scales) used by the
    /// liminf/limsup proxies.
    #[must_use]
    pub fn tail_start(&self) -> usize {
        self.eps_values.len() / 2
    }
}

/// Finite-scale estimate of the concentration exponents at a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingEstimate<F> {
    /// Min of tail-half per-scale ratios: proxy for gamma^-(x) (liminf).
    pub gamma_minus_hat: F,
    /// Max of tail-half per-scale ratios: proxy for gamma^+(x) (limsup).
    pub gamma_plus_hat: F,
    /// Least-squares slope of ln mu([x-eps,x+eps]) against ln eps over the
    /// tail half; insensitive to constant prefactors of the power law.
    pub regression_slope: F,
    /// Trace of (ln eps_j, ln mu([x-eps_j, x+eps_j])) for included scales.
    pub per_scale: Vec<(F, F)>,
    /// Grid indices whose interval carried zero mass (excluded from ratios).
    pub excluded_scales: Vec<usize>,
    /// True when some grid scale dips below the local inter-atom spacing:
    /// estimates at such scales see the atomic floor, not the measure.
    pub spacing_flag: bool,
}

/// Finite-scale estimate of the m-Borel scaling exponent at a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaEstimate<F> {
    /// Max of tail-half ratios ln J / ln eps: the largest sigma with
    /// eps^{-sigma} J bounded below along the grid (liminf proxy).
    pub sigma_liminf_hat: F,
    /// Min of tail-half ratios: the limsup counterpart.
    pub sigma_limsup_hat: F,
    /// Trace of (ln eps_j, ln J(x, eps_j)).
    pub per_scale: Vec<(F, F)>,
}

fn least_squares_slope<F: Real>(pts: &[(F, F)]) -> F {
    let n = F::from_f64_lossy(pts.len() as f64);
    let mx = pts.iter().map(|p| p.0).sum::<F>() / n;
    let my = pts.iter().map(|p| p.1).sum::<F>() / n;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    for &(x, y) in pts {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if sxx > F::zero() {
        sxy / sxx
    } else {
        // degenerate single-point tail: fall back to the plain ratio
        pts[0].1 / pts[0].0
    }
}

/// Estimates gamma^-(x) and gamma^+(x) from per-scale ratios
/// ln mu([x-eps_j, x+eps_j]) / ln eps_j over the tail half of the grid.
///
/// Scales with zero interval mass are excluded and flagged; if every scale is
/// empty, or no included scale survives in the tail half, this errs.
pub fn gamma_exponents<F: Real>(
    mu: &DiscreteMeasure<F>,
    x: F,
    grid: &ScaleGrid<F>,
) -> Result<ScalingEstimate<F>, MeasureError> {
    let tail_start = grid.tail_start();
    let spacing = mu.local_spacing(x);
    let mut per_scale = Vec::with_capacity(grid.len());
    let mut excluded_scales = Vec::new();
    let mut tail_ratios: Vec<F> = Vec::new();
    let mut tail_pts: Vec<(F, F)> = Vec::new();
    let mut spacing_flag = false;
    for (j, &eps) in grid.eps_values().iter().enumerate() {
        if eps < spacing {
            spacing_flag = true;
        }
        let mass = mu.concentration(x, eps);
        if mass <= F::zero() {
            excluded_scales.push(j);
            continue;
        }
        let le = eps.ln();
        let lm = mass.ln();
        per_scale.push((le, lm));
        if j >= tail_start {
            tail_ratios.push(lm / le);
            tail_pts.push((le, lm));
        }
    }
    if per_scale.is_empty() {
        return Err(MeasureError::AllScalesEmpty);
    }
    if tail_ratios.is_empty() {
        return Err(MeasureError::TailEmpty);
    }
    let gamma_minus_hat = tail_ratios.iter().copied().fold(F::infinity(), F::min);
    let gamma_plus_hat = tail_ratios.iter().copied().fold(F::neg_infinity(), F::max);
    Ok(ScalingEstimate {
        gamma_minus_hat,
        gamma_plus_hat,
        regression_slope: least_squares_slope(&tail_pts),
        per_scale,
        excluded_scales,
        spacing_flag,
    })
}

/// Estimates the m-Borel scaling exponent bracket from per-scale ratios
/// ln J_{mu,m}(x, eps_j) / ln eps_j over the tail half of the grid.
///
/// J is strictly positive for every nonempty measure, so no scale is ever
/// excluded here.
#[must_use]
pub fn j_scaling_exponent<F: Real>(
    mu: &DiscreteMeasure<F>,
    m: F,
    x: F,
    grid: &ScaleGrid<F>,
) -> SigmaEstimate<F> {
    let tail_start = grid.tail_start();
    let mut per_scale = Vec::with_capacity(grid.len());
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for (j, &eps) in grid.eps_values().iter().enumerate() {
        let jval = m_borel(mu, m, x, eps);
        let le = eps.ln();
        let lj = jval.ln();
        per_scale.push((le, lj));
        if j >= tail_start {
            let ratio = lj / le;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    SigmaEstimate {
        sigma_liminf_hat: hi,
        sigma_limsup_hat: lo,
        per_scale,
    }
}
