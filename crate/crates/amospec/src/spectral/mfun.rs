//! Half-line m-functions and the whole-line Borel transforms they
//! determine.
//!
//! With u_+ decaying at +infinity and u_- decaying at -infinity, set
//! m_1 = -u_+(1)/u_+(0) and m_2 = u_-(1)/u_-(0). Both are Herglotz:
//! m_1 is the (1,1) resolvent entry of the right half-line restriction,
//! and m_2 = (z - v(0)) plus the (-1,-1) resolvent entry of the left one.
//! Writing W = u_-(0)u_+(1) - u_-(1)u_+(0) for the Wronskian, the
//! whole-line Green entries G(0,0) and G(1,1) satisfy
//!
//!   M_1 = u_-(0)u_+(0)/W = -1/(m_1 + m_2),
//!   M_2 = u_-(1)u_+(1)/W = m_1 m_2/(m_1 + m_2).
//!
//! All four functions are evaluated as Borel sums over finite-truncation
//! spectral measures, so the identities double as an end-to-end audit of
//! the eigensolver: their residuals decay like exp(-Im z * N / 2) in the
//! truncation size N. Boundary conditions at angle x are applied as the
//! rotation m -> (cos * m + sin)/(-sin * m + cos), a determinant-one real
//! Mobius map that preserves the Herglotz property.

use num_complex::Complex;
use serde::Serialize;
use std::f64::consts::TAU;

use super::{
    borel_transform, eigensolve, spectral_measure, SpectralError, TruncatedOperator,
};
use crate::measure::DiscreteMeasure;
use crate::operator::AlmostMathieu;
use crate::tolerances::MFUN_STABILITY_TOL;

/// m-functions of both half lines and whole-line Borel transforms at one
/// point of the upper half plane.
#[derive(Debug, Clone, PartialEq)]
pub struct MFunctionPair {
    /// Evaluation point, Im z > 0.
    pub z: Complex<f64>,
    /// Right half-line m-function (Dirichlet at 0).
    pub m1: Complex<f64>,
    /// Left half-line m-function (Dirichlet at 0), including the z - v(0)
    /// term that closes the whole-line identities.
    pub m2: Complex<f64>,
    /// m1 rotated to the boundary condition x0.
    pub m1_tilde: Complex<f64>,
    /// m2 rotated to the boundary condition x0.
    pub m2_tilde: Complex<f64>,
    /// Whole-line Borel transform of the delta_0 spectral measure.
    pub big_m1: Complex<f64>,
    /// Whole-line Borel transform of the delta_1 spectral measure.
    pub big_m2: Complex<f64>,
    /// |M_1 + 1/(m1 + m2)|.
    pub residual_m1: f64,
    /// |M_2 - m1 m2/(m1 + m2)|.
    pub residual_m2: f64,
    /// Heuristic truncation error exp(-Im z * N / 2).
    pub truncation_estimate: f64,
}

/// Spectral measures of the three truncations an m-function evaluation
/// needs; build once, evaluate at many z.
#[derive(Debug, Clone)]
pub struct MFunctionSolver {
    n: i64,
    v0: f64,
    mu_right: DiscreteMeasure<f64>,
    mu_left: DiscreteMeasure<f64>,
    mu_whole_0: DiscreteMeasure<f64>,
    mu_whole_1: DiscreteMeasure<f64>,
}

impl MFunctionSolver {
    /// Eigensolves the truncations [1, n], [-n, -1], and [-n, n] and keeps
    /// their boundary-site spectral measures.
    pub fn new(op: &AlmostMathieu, n: i64) -> Result<Self, SpectralError> {
        let right = TruncatedOperator::window(op, 1, n)?;
        let left = TruncatedOperator::window(op, -n, -1)?;
        let whole = TruncatedOperator::window(op, -n, n)?;
        let data_r = eigensolve(&right, &[1])?;
        let data_l = eigensolve(&left, &[-1])?;
        let data_w = eigensolve(&whole, &[0, 1])?;
        Ok(Self {
            n,
            v0: op.potential_at(0),
            mu_right: spectral_measure(&data_r, &[(1, 1.0)])?,
            mu_left: spectral_measure(&data_l, &[(-1, 1.0)])?,
            mu_whole_0: spectral_measure(&data_w, &[(0, 1.0)])?,
            mu_whole_1: spectral_measure(&data_w, &[(1, 1.0)])?,
        })
    }

    /// Half-line truncation length.
    #[must_use]
    pub fn n(&self) -> i64 {
        self.n
    }

    /// Heuristic truncation error exp(-eps n / 2) at distance eps from the
    /// real axis.
    #[must_use]
    pub fn truncation_estimate(&self, eps: f64) -> f64 {
        (-0.5 * eps * self.n as f64).exp()
    }

    /// Evaluates every m-function at z = e + i eps with boundary phase x0.
    pub fn evaluate(&self, e: f64, eps: f64, x0: f64) -> Result<MFunctionPair, SpectralError> {
        for (name, value) in [("e", e), ("eps", eps), ("x0", x0)] {
            if !value.is_finite() {
                return Err(SpectralError::NonfiniteArgument { name, value });
            }
        }
        if eps <= 0.0 {
            return Err(SpectralError::NotUpperHalfPlane { im: eps });
        }
        let estimate = self.truncation_estimate(eps);
        if estimate > MFUN_STABILITY_TOL {
            let suggested = 2.5 * -(MFUN_STABILITY_TOL.ln()) / eps;
            return Err(SpectralError::EpsilonTooSmall {
                n: self.n,
                eps,
                estimate,
                suggested_n: suggested.ceil() as i64,
            });
        }
        let z = Complex::new(e, eps);
        let m1 = borel_transform(&self.mu_right, z);
        let m2 = Complex::new(e - self.v0, eps) + borel_transform(&self.mu_left, z);
        let big_m1 = borel_transform(&self.mu_whole_0, z);
        let big_m2 = borel_transform(&self.mu_whole_1, z);
        let (s, c) = (TAU * x0).sin_cos();
        let m1_tilde = (m1.scale(c) + s) / (-m1.scale(s) + c);
        let m2_tilde = (m2.scale(c) - s) / (m2.scale(s) + c);
        let sum = m1 + m2;
        let residual_m1 = (big_m1 + sum.inv()).norm();
        let residual_m2 = (big_m2 - m1 * m2 / sum).norm();
        Ok(MFunctionPair {
            z,
            m1,
            m2,
            m1_tilde,
            m2_tilde,
            big_m1,
            big_m2,
            residual_m1,
            residual_m2,
            truncation_estimate: estimate,
        })
    }
}

/// Right half-line m-function from a single truncation eigensolve; equal
/// to the m1 field a solver of the same length would produce.
pub fn half_line_m(
    op: &AlmostMathieu,
    n: i64,
    e: f64,
    eps: f64,
) -> Result<Complex<f64>, SpectralError> {
    if !e.is_finite() || !eps.is_finite() {
        return Err(SpectralError::NonfiniteArgument {
            name: "z",
            value: if e.is_finite() { eps } else { e },
        });
    }
    if eps <= 0.0 {
        return Err(SpectralError::NotUpperHalfPlane { im: eps });
    }
    let right = TruncatedOperator::window(op, 1, n)?;
    let data = eigensolve(&right, &[1])?;
    let mu = spectral_measure(&data, &[(1, 1.0)])?;
    Ok(borel_transform(&mu, Complex::new(e, eps)))
}

/// Free (zero-potential) half-line m-function (-z + sqrt(z^2 - 4))/2 on
/// the branch with positive imaginary part.
#[must_use]
pub fn free_m(z: Complex<f64>) -> Complex<f64> {
    let mut w = (z * z - 4.0).sqrt();
    if w.im <= 0.0 {
        w = -w;
    }
    (w - z).scale(0.5)
}

/// Outcome of testing Im M(e + i eps) * eps^t >= 1 - slack over a point
/// set, for a scaling exponent t admissible at the operator's coupling
/// and frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryScalingReport {
    /// Tested exponent.
    pub t: f64,
    /// Open upper limit log(lambda)/(2 beta - log(lambda)) for t.
    pub max_t: f64,
    /// Slack subtracted from 1 on the right-hand side.
    pub slack: f64,
    /// Number of points tested.
    pub n_points: usize,
    /// Number of points with Im M * eps^t >= 1 - slack.
    pub n_pass: usize,
    /// n_pass / n_points.
    pub pass_fraction: f64,
    /// Smallest value of Im M * eps^t - (1 - slack) over the points.
    pub worst_margin: f64,
    /// (e, eps) of the point attaining the worst margin.
    pub worst_point: (f64, f64),
}

/// Checks the boundary scaling Im M * eps^t >= 1 - slack over measured
/// points (e, eps, Im M). The exponent must satisfy
/// 0 <= t < log(lambda)/(2 beta - log(lambda)).
pub fn boundary_scaling_check(
    op: &AlmostMathieu,
    points: &[(f64, f64, f64)],
    t: f64,
    slack: f64,
) -> Result<BoundaryScalingReport, SpectralError> {
    let beta = op
        .freq()
        .beta(0)
        .map_err(|_| SpectralError::BetaUnavailable)?
        .value;
    let denom = 2.0 * beta - op.log_lambda();
    let max_t = if denom > 0.0 {
        op.log_lambda() / denom
    } else {
        f64::NEG_INFINITY
    };
    if !t.is_finite() || t < 0.0 || t >= max_t {
        return Err(SpectralError::TOutOfRange { t, max: max_t });
    }
    if points.is_empty() {
        return Err(SpectralError::EmptyInput { name: "points" });
    }
    for &(e, eps, im_m) in points {
        for (name, value) in [("e", e), ("eps", eps), ("Im M", im_m)] {
            if !value.is_finite() {
                return Err(SpectralError::NonfiniteArgument { name, value });
            }
        }
        if eps <= 0.0 {
            return Err(SpectralError::NotUpperHalfPlane { im: eps });
        }
    }
    let mut n_pass = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut worst_point = (f64::NAN, f64::NAN);
    for &(e, eps, im_m) in points {
        let margin = im_m * eps.powf(t) - (1.0 - slack);
        if margin >= 0.0 {
            n_pass += 1;
        }
        if margin < worst_margin {
            worst_margin = margin;
            worst_point = (e, eps);
        }
    }
    Ok(BoundaryScalingReport {
        t,
        max_t,
        slack,
        n_points: points.len(),
        n_pass,
        pass_fraction: n_pass as f64 / points.len() as f64,
        worst_margin,
        worst_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Frequency;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden() -> Frequency {
        Frequency::synthesize(0.0, 100_000).unwrap()
    }

    #[test]
    fn free_m_satisfies_quadratic_and_maps_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let z = Complex::new(
                rng.random_range(-6.0..6.0),
                rng.random_range(0.01..4.0),
            );
            let m = free_m(z);
            // m solves m^2 + z m + 1 = 0 on the interior Weyl branch.
            assert!((m * m + z * m + 1.0).norm() <= 1e-12 * (1.0 + z.norm_sqr()));
            assert!(m.im > 0.0, "free m not Herglotz at {z}");
            assert!(m.norm() < 1.0, "wrong branch at {z}");
        }
    }

    #[test]
    fn solver_reproduces_free_functions() {
        let op = AlmostMathieu::new(0.0, golden(), 0.0).unwrap();
        let solver = MFunctionSolver::new(&op, 200).unwrap();
        for &(e, eps) in &[(0.0, 0.5), (1.3, 0.7), (-2.5, 0.4)] {
            let z = Complex::new(e, eps);
            let pair = solver.evaluate(e, eps, 0.0).unwrap();
            let m = free_m(z);
            assert!((pair.m1 - m).norm() <= 1e-8, "m1 at {z}");
            assert!((pair.m2 - (z + m)).norm() <= 1e-8, "m2 at {z}");
            let mut w = (z * z - 4.0).sqrt();
            if w.im <= 0.0 {
                w = -w;
            }
            assert!((pair.big_m1 + w.inv()).norm() <= 1e-8, "M1 at {z}");
        }
    }

    #[test]
    fn zero_boundary_phase_is_identity() {
        let op = AlmostMathieu::new(1.5, golden(), 0.21).unwrap();
        let solver = MFunctionSolver::new(&op, 150).unwrap();
        let pair = solver.evaluate(0.3, 0.5, 0.0).unwrap();
        assert!((pair.m1_tilde - pair.m1).norm() <= 1e-15);
        assert!((pair.m2_tilde - pair.m2).norm() <= 1e-15);
    }

    #[test]
    fn all_six_functions_are_herglotz() {
        let op = AlmostMathieu::new(1.5, golden(), 0.37).unwrap();
        let solver = MFunctionSolver::new(&op, 150).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let e = rng.random_range(-5.0..5.0);
            let eps = rng.random_range(0.2..2.0);
            let x0 = rng.random_range(0.0..1.0);
            let pair = solver.evaluate(e, eps, x0).unwrap();
            for (name, v) in [
                ("m1", pair.m1),
                ("m2", pair.m2),
                ("m1_tilde", pair.m1_tilde),
                ("m2_tilde", pair.m2_tilde),
                ("M1", pair.big_m1),
                ("M2", pair.big_m2),
            ] {
                assert!(v.im > 0.0, "{name} not Herglotz at e={e}, eps={eps}");
            }
        }
    }

    #[test]
    fn identities_close_at_modest_truncation() {
        let op = AlmostMathieu::new(1.5, golden(), 0.11).unwrap();
        let solver = MFunctionSolver::new(&op, 300).unwrap();
        for &e in &[-2.0, 0.0, 1.7] {
            let pair = solver.evaluate(e, 0.3, 0.0).unwrap();
            assert!(pair.residual_m1 <= 1e-8, "M1 residual {}", pair.residual_m1);
            assert!(pair.residual_m2 <= 1e-8, "M2 residual {}", pair.residual_m2);
        }
    }

    #[test]
    fn unresolvable_eps_is_refused_with_suggestion() {
        let op = AlmostMathieu::new(1.5, golden(), 0.0).unwrap();
        let solver = MFunctionSolver::new(&op, 100).unwrap();
        match solver.evaluate(0.0, 1e-4, 0.0) {
            Err(SpectralError::EpsilonTooSmall { n, suggested_n, .. }) => {
                assert_eq!(n, 100);
                assert!(suggested_n > 300_000, "suggested {suggested_n}");
            }
            other => panic!("expected EpsilonTooSmall, got {other:?}"),
        }
        assert!(matches!(
            solver.evaluate(0.0, -0.5, 0.0),
            Err(SpectralError::NotUpperHalfPlane { .. })
        ));
    }

    #[test]
    fn doubling_the_truncation_is_stable() {
        let op = AlmostMathieu::new(2.0, golden(), 0.13).unwrap();
        let a = MFunctionSolver::new(&op, 400).unwrap();
        let b = MFunctionSolver::new(&op, 800).unwrap();
        let pa = a.evaluate(0.7, 0.3, 0.0).unwrap();
        let pb = b.evaluate(0.7, 0.3, 0.0).unwrap();
        assert!((pa.m1 - pb.m1).norm() <= MFUN_STABILITY_TOL);
        assert!((pa.m2 - pb.m2).norm() <= MFUN_STABILITY_TOL);
        assert!((pa.big_m1 - pb.big_m1).norm() <= MFUN_STABILITY_TOL);
    }

    #[test]
    fn half_line_helper_matches_solver_field() {
        let op = AlmostMathieu::new(1.2, golden(), 0.31).unwrap();
        let solver = MFunctionSolver::new(&op, 150).unwrap();
        let pair = solver.evaluate(0.4, 0.6, 0.0).unwrap();
        let m = half_line_m(&op, 150, 0.4, 0.6).unwrap();
        assert!((m - pair.m1).norm() <= 1e-12);
    }

    #[test]
    fn boundary_scaling_validates_and_scores() {
        let op = AlmostMathieu::new(0.7_f64.exp(), golden(), 0.0).unwrap();
        // Points built to scale exactly: Im M = eps^{-t} passes, a flat
        // small value fails.
        let t = 0.5;
        let good: Vec<(f64, f64, f64)> = (1..=5)
            .map(|k| {
                let eps = 10.0_f64.powi(-k);
                (0.0, eps, eps.powf(-t))
            })
            .collect();
        let report = boundary_scaling_check(&op, &good, t, 0.1).unwrap();
        assert_eq!(report.n_pass, 5);
        assert!((report.pass_fraction - 1.0).abs() < 1e-12);
        assert!(report.worst_margin >= 0.0);
        let mut mixed = good.clone();
        mixed.push((0.0, 1e-3, 0.5));
        let report = boundary_scaling_check(&op, &mixed, t, 0.1).unwrap();
        assert_eq!(report.n_pass, 5);
        assert!(report.worst_margin < 0.0);
        assert_eq!(report.worst_point, (0.0, 1e-3));
        assert!(matches!(
            boundary_scaling_check(&op, &good, 5.0, 0.1),
            Err(SpectralError::TOutOfRange { .. })
        ));
        assert!(matches!(
            boundary_scaling_check(&op, &good, -0.1, 0.1),
            Err(SpectralError::TOutOfRange { .. })
        ));
        assert!(matches!(
            boundary_scaling_check(&op, &[], t, 0.1),
            Err(SpectralError::EmptyInput { name: "points" })
        ));
    }
}
