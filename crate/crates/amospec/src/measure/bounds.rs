//! Closed-form dimension bounds tying the scaling exponents together.

use super::MeasureError;
use crate::scalar::Real;

/// Upper bound for gamma^+(x) from the m-Borel exponent and gamma^-(x):
/// sigma (m - gamma_minus) / (m - sigma).
///
/// Requires m > sigma >= 0 and 0 <= gamma_minus <= m; the specialization
/// gamma_minus = 0 gives m sigma / (m - sigma).
pub fn bound_thm_gamma_plus<F: Real>(
    m: F,
    sigma: F,
    gamma_minus: F,
) -> Result<F, MeasureError> {
    if m <= sigma {
        return Err(MeasureError::MSigmaViolated {
            m: m.as_f64(),
            sigma: sigma.as_f64(),
        });
    }
    if sigma < F::zero() {
        return Err(MeasureError::OutOfRegime {
            what: format!("sigma must be nonnegative, got {}", sigma.as_f64()),
        });
    }
    if gamma_minus < F::zero() || gamma_minus > m {
        return Err(MeasureError::OutOfRegime {
            what: format!(
                "gamma_minus must lie in [0, m], got {}",
                gamma_minus.as_f64()
            ),
        });
    }
    Ok(sigma * (m - gamma_minus) / (m - sigma))
}

/// Multifractal-dimension bound (2 beta - 2 log_lambda) / (2 beta - log_lambda)
/// in the subcritical regime 0 <= log_lambda <= beta.
///
/// log_lambda = 0 is admitted as the limiting value 1.
pub fn bound_thm12_multifractal<F: Real>(beta: F, log_lambda: F) -> Result<F, MeasureError> {
    if !(beta.is_finite() && beta > F::zero()) {
        return Err(MeasureError::OutOfRegime {
            what: format!("beta must be positive, got {}", beta.as_f64()),
        });
    }
    if log_lambda < F::zero() || log_lambda > beta {
        return Err(MeasureError::OutOfRegime {
            what: format!(
                "log_lambda must lie in [0, beta], got {}",
                log_lambda.as_f64()
            ),
        });
    }
    let two = F::from_f64_lossy(2.0);
    Ok((two * beta - two * log_lambda) / (two * beta - log_lambda))
}

/// Packing-dimension bound for the transition check: 2 (1 - log_lambda / beta)
/// when 0 < log_lambda < beta, and 0 at or beyond the boundary
/// log_lambda >= beta (where the packing dimension collapses).
pub fn bound_case2_packing<F: Real>(beta: F, log_lambda: F) -> Result<F, MeasureError> {
    if !(beta.is_finite() && beta > F::zero()) {
        return Err(MeasureError::OutOfRegime {
            what: format!("beta must be positive, got {}", beta.as_f64()),
        });
    }
    if !(log_lambda.is_finite() && log_lambda > F::zero()) {
        return Err(MeasureError::OutOfRegime {
            what: format!(
                "log_lambda must be positive, got {}",
                log_lambda.as_f64()
            ),
        });
    }
    if log_lambda >= beta {
        return Ok(F::zero());
    }
    let two = F::from_f64_lossy(2.0);
    Ok(two * (F::one() - log_lambda / beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_plus_bound_examples() {
        // m=2, sigma=2/3, gamma_minus=0: 2*(2/3)/(4/3) = 1
        let b = bound_thm_gamma_plus(2.0f64, 2.0 / 3.0, 0.0).unwrap();
        assert!((b - 1.0).abs() < 1e-15);
        // sigma = 0 collapses the bound for any admissible gamma_minus
        for g in [0.0, 0.5, 1.7] {
            assert_eq!(bound_thm_gamma_plus(2.0f64, 0.0, g).unwrap(), 0.0);
        }
        // m=2 with sigma from the multifractal bound at beta=1, lnl=0.7
        let sigma = bound_thm12_multifractal(1.0f64, 0.7).unwrap();
        assert!((sigma - 0.6 / 1.3).abs() < 1e-15);
        let b = bound_thm_gamma_plus(2.0f64, sigma, 0.0).unwrap();
        assert!((b - 0.6).abs() < 1e-12);
    }

    #[test]
    fn gamma_plus_bound_rejects_bad_regimes() {
        assert!(matches!(
            bound_thm_gamma_plus(2.0f64, 2.0, 0.0),
            Err(MeasureError::MSigmaViolated { .. })
        ));
        assert!(matches!(
            bound_thm_gamma_plus(2.0f64, 2.5, 0.0),
            Err(MeasureError::MSigmaViolated { .. })
        ));
        assert!(matches!(
            bound_thm_gamma_plus(2.0f64, -0.1, 0.0),
            Err(MeasureError::OutOfRegime { .. })
        ));
        assert!(matches!(
            bound_thm_gamma_plus(2.0f64, 0.5, 2.5),
            Err(MeasureError::OutOfRegime { .. })
        ));
    }

    #[test]
    fn multifractal_bound_examples() {
        assert_eq!(bound_thm12_multifractal(1.0f64, 1.0).unwrap(), 0.0);
        let b = bound_thm12_multifractal(1.0f64, 0.7).unwrap();
        assert!((b - 0.6 / 1.3).abs() < 1e-15);
        assert_eq!(bound_thm12_multifractal(1.0f64, 0.0).unwrap(), 1.0);
        assert!(bound_thm12_multifractal(0.0f64, 0.0).is_err());
        assert!(bound_thm12_multifractal(1.0f64, 1.1).is_err());
        assert!(bound_thm12_multifractal(1.0f64, -0.1).is_err());
    }

    #[test]
    fn packing_bound_examples() {
        let b = bound_case2_packing(1.0f64, 0.7).unwrap();
        assert!((b - 0.6).abs() < 1e-15);
        assert_eq!(bound_case2_packing(1.0f64, 1.0).unwrap(), 0.0);
        assert_eq!(bound_case2_packing(1.0f64, 1.5).unwrap(), 0.0);
        assert!(bound_case2_packing(1.0f64, 0.0).is_err());
        assert!(bound_case2_packing(-1.0f64, 0.5).is_err());
    }

    proptest! {
        // algebraic consistency: feeding the multifractal bound into the
        // gamma-plus bound at m=2, gamma_minus=0 reproduces the packing bound:
        // 2s/(2-s) = 2(1 - lnl/beta) at s = (2b-2l)/(2b-l)
        #[test]
        fn bounds_compose_consistently(beta in 0.1f64..5.0, frac in 0.01f64..0.99) {
            let log_lambda = beta * frac;
            let sigma = bound_thm12_multifractal(beta, log_lambda).unwrap();
            let via_sigma = bound_thm_gamma_plus(2.0f64, sigma, 0.0).unwrap();
            let direct = bound_case2_packing(beta, log_lambda).unwrap();
            prop_assert!((via_sigma - direct).abs() < 1e-12);
        }

        #[test]
        fn bounds_are_monotone_in_log_lambda(beta in 0.1f64..5.0, f1 in 0.01f64..0.99, f2 in 0.01f64..0.99) {
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let b1 = bound_thm12_multifractal(beta, beta * lo).unwrap();
            let b2 = bound_thm12_multifractal(beta, beta * hi).unwrap();
            prop_assert!(b2 <= b1 + 1e-15);
            let p1 = bound_case2_packing(beta, beta * lo).unwrap();
            let p2 = bound_case2_packing(beta, beta * hi).unwrap();
            prop_assert!(p2 <= p1 + 1e-15);
        }
    }
}
