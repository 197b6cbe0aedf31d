//! Dimension bounds for discrete Borel measures via m-Borel transforms, and
//! the almost Mathieu operator machinery used to exercise them.
//!
//! The crate has four layers:
//!
//! * [`arith`] — exact continued-fraction frequencies: expansion, synthesis
//!   toward a target resonance strength beta, convergents, Diophantine checks,
//!   and big-integer orbit phases.
//! * [`measure`] — discrete measures with concentration exponents gamma, the
//!   m-Borel transform J_{mu,m}(x, eps) = sum w_i / (1 + (|x-y_i|/eps)^m),
//!   Renyi sums, multifractal dimensions D(q), and the closed-form dimension
//!   bounds they satisfy.
//! * [`operator`] — the almost Mathieu operator
//!   (Hu)(n) = u(n+1) + u(n-1) + 2 lambda cos(2 pi (theta + n alpha)) u(n):
//!   transfer matrices, Lyapunov exponents, determinant recurrences, Green
//!   ratios, resonance classification, and decay-window checks.
//! * [`spectral`] — finite-volume spectral data from an in-crate symmetric
//!   tridiagonal eigensolver, spectral measures, half-line m-functions with
//!   their Weyl identities, and subordinacy quantities a(L), b(L), omega(L).
//!
//! The measure layer is generic over the floating scalar via [`scalar::Real`];
//! the operator and spectral layers are f64 throughout. Tolerances live in
//! [`tolerances`].

pub mod arith;
pub mod measure;
pub mod operator;
pub mod scalar;
pub mod spectral;
pub mod tolerances;

pub use arith::Frequency;
pub use operator::AlmostMathieu;

/// Double-precision discrete measure, the default throughout the harness.
pub type Measure64 = measure::DiscreteMeasure<f64>;
/// Single-precision discrete measure.
pub type Measure32 = measure::DiscreteMeasure<f32>;
/// Double-precision scale grid.
pub type ScaleGrid64 = measure::ScaleGrid<f64>;
