//! Measure-level dimension reports and the synthetic-suite inequality checks.
//!
//! The dimension estimates of a measure are essential sup/inf of the
//! pointwise exponents over mu. At desk scale those become weighted 95th/5th
//! percentiles of the per-point estimates across a seeded, weight-proportional
//! sample of atoms, which suppresses boundary-atom artifacts that true
//! extremes would pick up.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    bound_thm_gamma_plus, gamma_exponents, j_scaling_exponent, multifractal_dims,
    DiscreteMeasure, MeasureError, MultifractalEstimate, ScaleGrid, ScalingEstimate,
    SigmaEstimate,
};
use crate::tolerances::THEOREM_SUITE_SLACK;

/// Everything estimated at one sampled point of the measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplePointReport {
    /// The sampled atom position.
    pub x: f64,
    /// Fraction of the sample draws that landed on this atom.
    pub weight: f64,
    /// Concentration-exponent estimate at x.
    pub gamma: ScalingEstimate<f64>,
    /// m-Borel exponent estimate at x.
    pub sigma: SigmaEstimate<f64>,
    /// sigma (m - gamma_minus)/(m - sigma) evaluated at this point's
    /// estimates (inputs clamped into the bound's regime); None when
    /// sigma_liminf_hat >= m leaves the bound undefined.
    pub gamma_plus_bound: Option<f64>,
}

/// Range of the m-Borel exponent estimates across the sampled points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SigmaSummary {
    /// Smallest per-point liminf proxy.
    pub liminf_hat_min: f64,
    /// Largest per-point liminf proxy (essential-sup stand-in).
    pub liminf_hat_max: f64,
    /// Smallest per-point limsup proxy.
    pub limsup_hat_min: f64,
    /// Largest per-point limsup proxy.
    pub limsup_hat_max: f64,
}

/// Dimension estimates of a measure, assembled from sampled points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Weighted 95th percentile of gamma_minus_hat: upper Hausdorff dimension.
    pub dim_h_plus_hat: f64,
    /// Weighted 5th percentile of gamma_minus_hat: lower Hausdorff dimension.
    pub dim_h_minus_hat: f64,
    /// Weighted 95th percentile of gamma_plus_hat: upper packing dimension.
    pub dim_p_plus_hat: f64,
    /// Weighted 5th percentile of gamma_plus_hat: lower packing dimension.
    pub dim_p_minus_hat: f64,
    /// True when any estimate had to be clamped into [0, 1].
    pub clamped: bool,
    /// Multifractal dimension brackets per requested moment order.
    pub renyi: Vec<MultifractalEstimate<f64>>,
    /// Spread of the m-Borel exponent estimates.
    pub sigma: SigmaSummary,
    /// Per-point traces.
    pub points: Vec<SamplePointReport>,
    /// The m-Borel order used throughout.
    pub m: f64,
    /// Number of sample draws.
    pub n_samples: usize,
    /// Sampling seed.
    pub seed: u64,
}

/// One inequality instance checked at a sampled point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointCheck {
    /// The sampled atom position.
    pub x: f64,
    /// gamma_plus_hat at x.
    pub gamma_plus_hat: f64,
    /// gamma_minus_hat at x.
    pub gamma_minus_hat: f64,
    /// sigma bracket at x.
    pub sigma_liminf_hat: f64,
    /// sigma bracket at x.
    pub sigma_limsup_hat: f64,
    /// bound + slack - gamma_plus_hat; nonnegative means pass.
    pub gamma_plus_bound_margin: f64,
    /// gamma_plus_hat <= bound(m, sigma_liminf_hat, gamma_minus_hat) + slack.
    pub gamma_plus_bound_pass: bool,
    /// sigma_limsup_hat + slack - gamma_minus_hat; nonnegative means pass.
    pub gamma_minus_sigma_margin: f64,
    /// gamma_minus_hat <= sigma_limsup_hat + slack.
    pub gamma_minus_sigma_pass: bool,
}

/// Moment-dimension inequality at one order q, checked per measure.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomentSigmaCheck {
    /// Moment order (q >= 1 + 1/m regime).
    pub q: f64,
    /// Upper multifractal dimension estimate at q.
    pub d_plus_hat: f64,
    /// Essential-sup proxy: max of sigma_liminf_hat over sampled points.
    pub sigma_ref: f64,
    /// sigma_ref + slack - d_plus_hat; nonnegative means pass.
    pub margin: f64,
    /// d_plus_hat <= sigma_ref + slack.
    pub pass: bool,
}

/// All inequality checks for one suite measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureCheck {
    /// Human-readable measure label.
    pub name: String,
    /// Per-point inequality outcomes.
    pub points: Vec<PointCheck>,
    /// Per-order moment-dimension outcomes.
    pub moment_checks: Vec<MomentSigmaCheck>,
    /// True when every point and moment check passed.
    pub pass: bool,
}

/// Outcome of the full synthetic-suite inequality run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteCheckReport {
    /// Per-measure outcomes.
    pub measures: Vec<MeasureCheck>,
    /// Finite-scale slack applied to every inequality.
    pub slack: f64,
    /// Sampling seed.
    pub seed: u64,
    /// True when every measure passed.
    pub pass: bool,
}

/// Weighted percentile: smallest value whose cumulative weight reaches
/// frac * total. `frac` in [0, 1].
fn weighted_percentile(values: &mut [(f64, f64)], frac: f64) -> f64 {
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite estimates"));
    let total: f64 = values.iter().map(|v| v.1).sum();
    let target = frac * total;
    let mut cum = 0.0;
    for &(v, w) in values.iter() {
        cum += w;
        if cum >= target - 1e-12 * total {
            return v;
        }
    }
    values.last().map_or(f64::NAN, |v| v.0)
}

/// Samples points from mu, estimates all pointwise exponents, and assembles
/// the dimension estimates with weighted 95th/5th percentiles standing in for
/// mu-essential sup/inf.
pub fn dimension_report(
    mu: &DiscreteMeasure<f64>,
    grid: &ScaleGrid<f64>,
    q_list: &[f64],
    m: f64,
    n_samples: usize,
    seed: u64,
) -> Result<DimensionReport, MeasureError> {
    if n_samples == 0 {
        return Err(MeasureError::BadSampleCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = mu.sample_indices(&mut rng, n_samples);
    let mut points = Vec::with_capacity(samples.len());
    let mut gm: Vec<(f64, f64)> = Vec::new();
    let mut gp: Vec<(f64, f64)> = Vec::new();
    let mut sigma = SigmaSummary {
        liminf_hat_min: f64::INFINITY,
        liminf_hat_max: f64::NEG_INFINITY,
        limsup_hat_min: f64::INFINITY,
        limsup_hat_max: f64::NEG_INFINITY,
    };
    for (idx, mult) in samples {
        let x = mu.positions()[idx];
        let weight = mult as f64 / n_samples as f64;
        let gamma = gamma_exponents(mu, x, grid)?;
        let sig = j_scaling_exponent(mu, m, x, grid);
        sigma.liminf_hat_min = sigma.liminf_hat_min.min(sig.sigma_liminf_hat);
        sigma.liminf_hat_max = sigma.liminf_hat_max.max(sig.sigma_liminf_hat);
        sigma.limsup_hat_min = sigma.limsup_hat_min.min(sig.sigma_limsup_hat);
        sigma.limsup_hat_max = sigma.limsup_hat_max.max(sig.sigma_limsup_hat);
        // clamp estimator noise into the bound's regime; the clamps only
        // shrink the bound, so downstream inequality checks stay conservative
        let s_in = sig.sigma_liminf_hat.max(0.0);
        let g_in = gamma.gamma_minus_hat.clamp(0.0, m);
        let gamma_plus_bound = if s_in < m {
            Some(bound_thm_gamma_plus(m, s_in, g_in)?)
        } else {
            None
        };
        gm.push((gamma.gamma_minus_hat, weight));
        gp.push((gamma.gamma_plus_hat, weight));
        points.push(SamplePointReport {
            x,
            weight,
            gamma,
            sigma: sig,
            gamma_plus_bound,
        });
    }
    let raw = [
        weighted_percentile(&mut gm, 0.95),
        weighted_percentile(&mut gm, 0.05),
        weighted_percentile(&mut gp, 0.95),
        weighted_percentile(&mut gp, 0.05),
    ];
    let clamped = raw.iter().any(|v| *v < 0.0 || *v > 1.0);
    let renyi = q_list
        .iter()
        .map(|&q| multifractal_dims(mu, q, grid))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DimensionReport {
        dim_h_plus_hat: raw[0].clamp(0.0, 1.0),
        dim_h_minus_hat: raw[1].clamp(0.0, 1.0),
        dim_p_plus_hat: raw[2].clamp(0.0, 1.0),
        dim_p_minus_hat: raw[3].clamp(0.0, 1.0),
        clamped,
        renyi,
        sigma,
        points,
        m,
        n_samples,
        seed,
    })
}

#[allow(clippy::too_many_arguments)]
fn check_one_measure(
    name: &str,
    mu: &DiscreteMeasure<f64>,
    grid: &ScaleGrid<f64>,
    q_list: &[f64],
    m: f64,
    n_samples: usize,
    seed: u64,
    slack: f64,
) -> Result<MeasureCheck, MeasureError> {
    let report = dimension_report(mu, grid, q_list, m, n_samples, seed)?;
    let mut points = Vec::with_capacity(report.points.len());
    let mut all_pass = true;
    for p in &report.points {
        let bound = p.gamma_plus_bound.unwrap_or(f64::NAN);
        let m13 = bound + slack - p.gamma.gamma_plus_hat;
        let p13 = m13 >= 0.0;
        let m18 = p.sigma.sigma_limsup_hat + slack - p.gamma.gamma_minus_hat;
        let p18 = m18 >= 0.0;
        all_pass &= p13 && p18;
        points.push(PointCheck {
            x: p.x,
            gamma_plus_hat: p.gamma.gamma_plus_hat,
            gamma_minus_hat: p.gamma.gamma_minus_hat,
            sigma_liminf_hat: p.sigma.sigma_liminf_hat,
            sigma_limsup_hat: p.sigma.sigma_limsup_hat,
            gamma_plus_bound_margin: m13,
            gamma_plus_bound_pass: p13,
            gamma_minus_sigma_margin: m18,
            gamma_minus_sigma_pass: p18,
        });
    }
    let sigma_ref = report.sigma.liminf_hat_max;
    let mut moment_checks = Vec::with_capacity(report.renyi.len());
    for est in &report.renyi {
        let margin = sigma_ref + slack - est.d_plus_hat;
        let pass = margin >= 0.0;
        all_pass &= pass;
        moment_checks.push(MomentSigmaCheck {
            q: est.q,
            d_plus_hat: est.d_plus_hat,
            sigma_ref,
            margin,
            pass,
        });
    }
    Ok(MeasureCheck {
        name: name.to_owned(),
        points,
        moment_checks,
        pass: all_pass,
    })
}

/// Runs the three empirical scaling inequalities over the synthetic suite:
/// standard Cantor, biased Cantor (left weight 0.3), a Lebesgue
/// discretization, and a single atom. Per measure, 50 weight-proportionally
/// sampled points, m = 2, q in {3/2, 2}, each inequality with finite-scale
/// slack 0.1:
///
/// * gamma_plus_hat <= bound(m, sigma_liminf_hat, gamma_minus_hat) + slack,
/// * gamma_minus_hat <= sigma_limsup_hat + slack,
/// * d_plus_hat(q) <= max_x sigma_liminf_hat + slack.
///
/// The scale grids are measure-specific: triadic for the Cantor pair, dyadic
/// down past the atom spacing for the Lebesgue discretization (where the
/// estimators cross over to the atomic regime), dyadic for the atom.
pub fn theorem_suite_check(seed: u64) -> Result<SuiteCheckReport, MeasureError> {
    let q_list = [1.5, 2.0];
    let m = 2.0;
    let n_samples = 50;
    let slack = THEOREM_SUITE_SLACK;
    let mut measures = Vec::with_capacity(4);

    let grid3 = ScaleGrid::from_base_powers(3.0, 3, 13)?;
    let mu = DiscreteMeasure::cantor(16, 0.5)?;
    measures.push(check_one_measure(
        "cantor-standard",
        &mu,
        &grid3,
        &q_list,
        m,
        n_samples,
        seed,
        slack,
    )?);
    let mu = DiscreteMeasure::cantor(16, 0.3)?;
    measures.push(check_one_measure(
        "cantor-biased-0.3",
        &mu,
        &grid3,
        &q_list,
        m,
        n_samples,
        seed,
        slack,
    )?);
    drop(mu);

    let grid2 = ScaleGrid::from_base_powers(2.0, 4, 24)?;
    let mu = DiscreteMeasure::uniform(10_000_000)?;
    measures.push(check_one_measure(
        "lebesgue-1e7",
        &mu,
        &grid2,
        &q_list,
        m,
        n_samples,
        seed,
        slack,
    )?);
    drop(mu);

    let grid_atom = ScaleGrid::from_base_powers(2.0, 4, 14)?;
    let mu = DiscreteMeasure::single_atom(0.5)?;
    measures.push(check_one_measure(
        "single-atom",
        &mu,
        &grid_atom,
        &q_list,
        m,
        n_samples,
        seed,
        slack,
    )?);

    let pass = measures.iter().all(|m| m.pass);
    Ok(SuiteCheckReport {
        measures,
        slack,
        seed,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2_OVER_LN3: f64 = 0.6309297535714574;

    #[test]
    fn single_atom_report_is_all_zero() {
        let mu = DiscreteMeasure::single_atom(0.5).unwrap();
        let grid = ScaleGrid::from_base_powers(2.0, 4, 14).unwrap();
        let rep = dimension_report(&mu, &grid, &[1.5, 2.0], 2.0, 10, 3).unwrap();
        assert!(rep.dim_h_plus_hat.abs() < 1e-12);
        assert!(rep.dim_h_minus_hat.abs() < 1e-12);
        assert!(rep.dim_p_plus_hat.abs() < 1e-12);
        assert!(rep.dim_p_minus_hat.abs() < 1e-12);
        assert!(!rep.clamped);
        for est in &rep.renyi {
            assert!(est.d_plus_hat.abs() < 1e-12);
        }
        assert_eq!(rep.points.len(), 1);
    }

    #[test]
    fn cantor_report_dimensions() {
        let mu = DiscreteMeasure::cantor(12, 0.5).unwrap();
        let grid = ScaleGrid::from_base_powers(3.0, 3, 9).unwrap();
        let rep = dimension_report(&mu, &grid, &[2.0], 2.0, 40, 11).unwrap();
        assert!((rep.dim_h_plus_hat - LN2_OVER_LN3).abs() < 0.07, "{}", rep.dim_h_plus_hat);
        assert!((rep.dim_p_plus_hat - LN2_OVER_LN3).abs() < 0.07, "{}", rep.dim_p_plus_hat);
        assert!(rep.dim_h_minus_hat <= rep.dim_h_plus_hat);
        assert!(rep.dim_p_minus_hat <= rep.dim_p_plus_hat);
    }

    #[test]
    fn report_is_deterministic_in_seed() {
        let mu = DiscreteMeasure::cantor(10, 0.3).unwrap();
        let grid = ScaleGrid::from_base_powers(3.0, 2, 8).unwrap();
        let a = dimension_report(&mu, &grid, &[2.0], 2.0, 25, 5).unwrap();
        let b = dimension_report(&mu, &grid, &[2.0], 2.0, 25, 5).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = dimension_report(&mu, &grid, &[2.0], 2.0, 25, 6).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn zero_samples_is_an_error() {
        let mu = DiscreteMeasure::single_atom(0.0).unwrap();
        let grid = ScaleGrid::from_base_powers(2.0, 1, 4).unwrap();
        assert!(matches!(
            dimension_report(&mu, &grid, &[], 2.0, 0, 0),
            Err(MeasureError::BadSampleCount)
        ));
    }

    #[test]
    fn small_cantor_measure_check_passes() {
        let mu = DiscreteMeasure::cantor(10, 0.5).unwrap();
        let grid = ScaleGrid::from_base_powers(3.0, 2, 8).unwrap();
        let check =
            check_one_measure("cantor-10", &mu, &grid, &[1.5, 2.0], 2.0, 20, 1, 0.1).unwrap();
        assert!(check.pass, "{check:?}");
        assert_eq!(check.moment_checks.len(), 2);
        for mc in &check.moment_checks {
            assert!(mc.margin >= 0.0);
        }
    }

    #[test]
    fn atom_measure_check_has_exact_slack_margin() {
        let mu = DiscreteMeasure::single_atom(0.25).unwrap();
        let grid = ScaleGrid::from_base_powers(2.0, 4, 14).unwrap();
        let check = check_one_measure("atom", &mu, &grid, &[2.0], 2.0, 5, 9, 0.1).unwrap();
        assert!(check.pass);
        for p in &check.points {
            assert!((p.gamma_plus_bound_margin - 0.1).abs() < 1e-9);
            assert!((p.gamma_minus_sigma_margin - 0.1).abs() < 1e-9);
        }
    }
}
