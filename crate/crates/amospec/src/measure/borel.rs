//! The m-Borel transform J_{mu,m}(x,eps) and the classical Borel transform.

use num_complex::Complex;
use rayon::prelude::*;

use super::DiscreteMeasure;
use crate::scalar::Real;

/// Atom count above which the transform sums run in parallel.
const PAR_ATOM_THRESHOLD: usize = 65_536;

/// J_{mu,m}(x, eps) = eps^m Int dmu(y) / (|x-y|^m + eps^m), evaluated as
/// sum_i w_i / (1 + (|x-y_i|/eps)^m) so that distant atoms underflow to zero
/// instead of overflowing.
///
/// The value lies in (0, total_mass], and is nondecreasing in eps. The m = 2
/// case is a plain rational summand and avoids `powf` entirely.
///
/// # Panics
///
/// Panics when `m <= 0` or `eps <= 0`.
#[must_use]
pub fn m_borel<F: Real>(mu: &DiscreteMeasure<F>, m: F, x: F, eps: F) -> F {
    assert!(m > F::zero(), "m_borel requires m > 0");
    assert!(eps > F::zero(), "m_borel requires eps > 0");
    let positions = mu.positions();
    let weights = mu.weights();
    let two = F::from_f64_lossy(2.0);
    if m == two {
        let body = |(&y, &w): (&F, &F)| {
            let t = (x - y) / eps;
            let t2 = t * t;
            if t2.is_finite() {
                w / (F::one() + t2)
            } else {
                // |x-y|/eps overflowed when squared; the true summand is
                // below every subnormal, so it contributes nothing.
                F::zero()
            }
        };
        if positions.len() >= PAR_ATOM_THRESHOLD {
            positions.par_iter().zip(weights.par_iter()).map(body).sum()
        } else {
            positions.iter().zip(weights.iter()).map(body).sum()
        }
    } else {
        let body = |(&y, &w): (&F, &F)| {
            let t = ((x - y) / eps).abs();
            let tm = t.powf(m);
            if tm.is_finite() {
                w / (F::one() + tm)
            } else {
                F::zero()
            }
        };
        if positions.len() >= PAR_ATOM_THRESHOLD {
            positions.par_iter().zip(weights.par_iter()).map(body).sum()
        } else {
            positions.iter().zip(weights.iter()).map(body).sum()
        }
    }
}

/// Borel (Cauchy-Stieltjes) transform M(z) = Int dmu(y) / (y - z) of a
/// discrete measure, for z in the open upper half plane.
///
/// For m = 2 the two transforms tie together as
/// J_{mu,2}(x, eps) = eps * Im M(x + i eps), an algebraic identity that the
/// tests check to 1e-12 relative accuracy.
///
/// # Panics
///
/// Panics when `Im z <= 0`.
#[must_use]
pub fn borel_transform<F: Real>(mu: &DiscreteMeasure<F>, z: Complex<F>) -> Complex<F> {
    assert!(
        z.im > F::zero(),
        "borel_transform requires z in the upper half plane"
    );
    let positions = mu.positions();
    let weights = mu.weights();
    let body = |(&y, &w): (&F, &F)| {
        // 1/(y - z) spelled out to avoid a complex division per atom.
        let re = y - z.re;
        let d = re * re + z.im * z.im;
        Complex::new(w * re / d, w * z.im / d)
    };
    if positions.len() >= PAR_ATOM_THRESHOLD {
        positions
            .par_iter()
            .zip(weights.par_iter())
            .map(body)
            .reduce(|| Complex::new(F::zero(), F::zero()), |a, b| a + b)
    } else {
        positions
            .iter()
            .zip(weights.iter())
            .map(body)
            .fold(Complex::new(F::zero(), F::zero()), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_measure() -> impl Strategy<Value = DiscreteMeasure<f64>> {
        prop::collection::vec(((-1.0f64..1.0), (1e-3f64..1.0)), 1..40)
            .prop_map(|atoms| DiscreteMeasure::from_atoms(atoms).unwrap())
    }

    #[test]
    fn unit_atom_at_x_gives_total_mass() {
        let mu = DiscreteMeasure::single_atom(0.25f64).unwrap();
        for m in [0.5, 1.0, 2.0, 7.3] {
            for eps in [1e-9, 1e-3, 1.0, 100.0] {
                assert_eq!(m_borel(&mu, m, 0.25, eps), 1.0);
            }
        }
    }

    #[test]
    fn lebesgue_m2_recovers_pi_times_eps() {
        let mu = DiscreteMeasure::<f64>::uniform(100_000).unwrap();
        let x = 0.37;
        for eps in [1e-3, 3e-3, 1e-2] {
            let j = m_borel(&mu, 2.0, x, eps);
            // closed form for the continuum limit:
            // J(x,eps) = eps * (arctan((1-x)/eps) + arctan(x/eps)) -> pi*eps
            let exact = eps * (((1.0 - x) / eps).atan() + (x / eps).atan());
            assert!((j / exact - 1.0).abs() < 5e-3, "eps={eps}: {j} vs {exact}");
            assert!((j / eps - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI);
        }
    }

    #[test]
    fn far_atoms_underflow_instead_of_overflowing() {
        let mu = DiscreteMeasure::from_atoms(vec![(0.0f64, 0.5), (1e200, 0.5)]).unwrap();
        for m in [2.0, 7.0] {
            let j = m_borel(&mu, m, 0.0, 1e-3);
            assert!(j.is_finite());
            assert!((j - 0.5).abs() < 1e-15);
        }
        // and the huge-side evaluation still sees its own atom
        let j = m_borel(&mu, 2.0, 1e200, 1e-3);
        assert!((j - 0.5).abs() < 1e-15);
    }

    #[test]
    fn m2_fast_path_matches_powf_path() {
        let mu = DiscreteMeasure::cantor(8, 0.4f64).unwrap();
        let x = 0.3;
        for eps in [1e-6, 1e-3, 0.1] {
            let fast = m_borel(&mu, 2.0, x, eps);
            let slow: f64 = mu
                .positions()
                .iter()
                .zip(mu.weights())
                .map(|(&y, &w)| w / (1.0 + ((x - y) / eps).abs().powf(2.0)))
                .sum();
            assert!((fast / slow - 1.0).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn identity_with_borel_transform(
            mu in small_measure(),
            x in -2.0f64..2.0,
            eps in 1e-6f64..1.0,
        ) {
            let j = m_borel(&mu, 2.0, x, eps);
            let m_val = borel_transform(&mu, num_complex::Complex::new(x, eps));
            let rhs = eps * m_val.im;
            prop_assert!(
                (j - rhs).abs() <= 1e-12 * j.abs().max(rhs.abs()),
                "J = {j}, eps*Im M = {rhs}"
            );
        }

        #[test]
        fn monotone_in_eps_and_bounded_by_mass(
            mu in small_measure(),
            x in -2.0f64..2.0,
            m in prop::sample::select(vec![0.5f64, 1.0, 2.0, 3.5]),
        ) {
            let mut last = 0.0f64;
            for k in (0..=24).rev() {
                let eps = 2.0f64.powi(-k) * 16.0;
                let j = m_borel(&mu, m, x, eps);
                prop_assert!(j > 0.0);
                prop_assert!(j <= mu.total_mass() * (1.0 + 1e-14));
                prop_assert!(j + 1e-15 >= last, "J not monotone at eps={eps}");
                last = j;
            }
        }
    }
}
