//! The almost Mathieu operator `(Hu)(n) = u(n+1) + u(n-1) + v(theta + n alpha) u(n)`
//! with potential `v(x) = 2 lambda cos(2 pi x)`.

use std::f64::consts::TAU;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::OperatorError;
use crate::arith::Frequency;

/// Almost Mathieu operator data: coupling, frequency, and phase offset.
///
/// The phase `theta` is stored exactly as a big rational so that orbit
/// phases `theta + n alpha mod 1` stay accurate over arbitrarily long
/// windows. The coupling may be zero, which gives the free Laplacian
/// `v = 0` used as a degenerate test path.
#[derive(Debug, Clone)]
pub struct AlmostMathieu {
    coupling_lambda: f64,
    freq: Frequency,
    theta: BigRational,
    theta_f64: f64,
}

impl AlmostMathieu {
    /// Builds the operator from a float phase, reduced mod 1 exactly.
    ///
    /// Every finite double is a rational number, so this loses nothing;
    /// use [`AlmostMathieu::with_rational_phase`] when theta comes from a
    /// decimal string.
    pub fn new(coupling_lambda: f64, freq: Frequency, theta: f64) -> Result<Self, OperatorError> {
        if !theta.is_finite() {
            return Err(OperatorError::NonfiniteArgument {
                name: "theta",
                value: theta,
            });
        }
        let exact = BigRational::from_float(theta).expect("finite float converts to rational");
        Self::with_rational_phase(coupling_lambda, freq, exact)
    }

    /// Builds the operator from an exact rational phase, reduced mod 1.
    pub fn with_rational_phase(
        coupling_lambda: f64,
        freq: Frequency,
        theta: BigRational,
    ) -> Result<Self, OperatorError> {
        if !coupling_lambda.is_finite() || coupling_lambda < 0.0 {
            return Err(OperatorError::BadCoupling {
                lambda: coupling_lambda,
            });
        }
        let reduced = &theta - theta.floor();
        let theta_f64 = reduced.to_f64().expect("phase in [0,1) converts");
        Ok(Self {
            coupling_lambda,
            freq,
            theta: reduced,
            theta_f64,
        })
    }

    /// Coupling constant lambda.
    #[must_use]
    #[inline]
    pub fn coupling(&self) -> f64 {
        self.coupling_lambda
    }

    /// ln(lambda); minus infinity on the degenerate free path lambda = 0.
    #[must_use]
    #[inline]
    pub fn log_lambda(&self) -> f64 {
        self.coupling_lambda.ln()
    }

    /// Frequency alpha with its continued-fraction data.
    #[must_use]
    #[inline]
    pub fn freq(&self) -> &Frequency {
        &self.freq
    }

    /// Phase offset theta as a double in [0, 1).
    #[must_use]
    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta_f64
    }

    /// Phase offset theta as the exact stored rational.
    #[must_use]
    #[inline]
    pub fn theta_exact(&self) -> &BigRational {
        &self.theta
    }

    /// Potential v(x) = 2 lambda cos(2 pi x) at a raw (already reduced) phase.
    #[must_use]
    #[inline]
    pub fn potential(&self, x: f64) -> f64 {
        2.0 * self.coupling_lambda * (TAU * x).cos()
    }

    /// Orbit phase theta + n alpha mod 1, exactly reduced then rounded once.
    #[must_use]
    pub fn phase_at(&self, n: i64) -> f64 {
        self.freq
            .phase_at(&self.theta, n)
            .to_f64()
            .expect("phase in [0,1) converts")
    }

    /// Potential at orbit site n: v(theta + n alpha).
    #[must_use]
    pub fn potential_at(&self, n: i64) -> f64 {
        self.potential(self.phase_at(n))
    }

    /// Iterator over orbit phases theta + n alpha mod 1 from n = n_start,
    /// exactly resynchronized in blocks.
    pub fn phase_stream(&self, n_start: i64) -> impl Iterator<Item = f64> + '_ {
        self.freq.phase_iter(&self.theta, n_start)
    }

    /// Iterator over orbit phases offset by an extra float phase shift:
    /// (theta0 + n alpha) mod 1 from n = n_start, where theta0 is given
    /// directly rather than taken from the operator.
    ///
    /// The shift is converted to an exact rational first, so the stream has
    /// the same accuracy as [`AlmostMathieu::phase_stream`].
    pub fn phase_stream_from(
        &self,
        theta0: f64,
        n_start: i64,
    ) -> Result<impl Iterator<Item = f64> + '_, OperatorError> {
        if !theta0.is_finite() {
            return Err(OperatorError::NonfiniteArgument {
                name: "theta0",
                value: theta0,
            });
        }
        let exact = BigRational::from_float(theta0).expect("finite float converts to rational");
        Ok(self.freq.phase_iter(&exact, n_start))
    }

    /// Radius 2 + 2 lambda of the interval certainly containing the spectrum.
    #[must_use]
    #[inline]
    pub fn spectrum_radius(&self) -> f64 {
        2.0 + 2.0 * self.coupling_lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Frequency;

    fn golden() -> Frequency {
        Frequency::synthesize(0.0, 100_000).unwrap()
    }

    #[test]
    fn rejects_bad_coupling() {
        let f = golden();
        assert!(matches!(
            AlmostMathieu::new(-1.0, f.clone(), 0.0),
            Err(OperatorError::BadCoupling { .. })
        ));
        assert!(matches!(
            AlmostMathieu::new(f64::NAN, f.clone(), 0.0),
            Err(OperatorError::BadCoupling { .. })
        ));
        assert!(matches!(
            AlmostMathieu::new(1.0, f, f64::INFINITY),
            Err(OperatorError::NonfiniteArgument { .. })
        ));
    }

    #[test]
    fn theta_reduced_mod_one() {
        let op = AlmostMathieu::new(1.0, golden(), 2.75).unwrap();
        assert!((op.theta() - 0.75).abs() < 1e-15);
        let op = AlmostMathieu::new(1.0, golden(), -0.25).unwrap();
        assert!((op.theta() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn potential_matches_cosine() {
        let op = AlmostMathieu::new(1.5, golden(), 0.2).unwrap();
        let v = op.potential_at(0);
        assert!((v - 3.0 * (std::f64::consts::TAU * 0.2).cos()).abs() < 1e-12);
        // lambda = 0 kills the potential everywhere.
        let free = AlmostMathieu::new(0.0, golden(), 0.2).unwrap();
        for n in [-3_i64, 0, 7, 1000] {
            assert_eq!(free.potential_at(n), 0.0);
        }
    }

    #[test]
    fn phase_stream_agrees_with_phase_at() {
        let op = AlmostMathieu::new(1.0, golden(), 0.3).unwrap();
        let stream: Vec<f64> = op.phase_stream(-5).take(11).collect();
        for (i, &p) in stream.iter().enumerate() {
            let n = -5 + i as i64;
            assert!(
                (p - op.phase_at(n)).abs() < 2e-13,
                "site {n}: stream {p} vs exact {}",
                op.phase_at(n)
            );
        }
    }

    #[test]
    fn phase_stream_from_applies_offset() {
        let op = AlmostMathieu::new(1.0, golden(), 0.3).unwrap();
        let base = op.phase_at(4);
        let mut shifted = op.phase_stream_from(base, 0).unwrap();
        let direct = op.phase_at(4);
        assert!((shifted.next().unwrap() - direct).abs() < 2e-13);
    }
}
