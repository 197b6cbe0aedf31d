//! Scalar abstraction for the measure-theoretic layer.
//!
//! Estimators over discrete measures are generic over any IEEE-style float so
//! the same code runs in f32 for quick scans and f64 for the verification
//! pipelines. The operator and spectral layers stay on f64: their tolerances
//! (1e-12 bisection, 1e-9 determinant drift) are senseless in f32.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the measure layer.
///
/// A blanket implementation covers every type with the listed capabilities;
/// in practice that is f32 and f64.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Send + Sync + Debug + Display + 'static
{
    /// Converts from f64, panicking only for values outside the type's range.
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 value not representable in this scalar type")
    }

    /// Converts to f64 (exact for f32/f64).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not convertible to f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Send + Sync + Debug + Display + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_generic<F: Real>(xs: &[F]) -> F {
        xs.iter().copied().sum()
    }

    #[test]
    fn blanket_impl_covers_both_widths() {
        assert_eq!(sum_generic(&[1.0f32, 2.0, 3.0]), 6.0f32);
        assert_eq!(sum_generic(&[1.0f64, 2.0, 3.0]), 6.0f64);
        assert_eq!(f32::from_f64_lossy(0.5f64), 0.5f32);
        assert_eq!(2.5f64.as_f64(), 2.5);
    }
}
