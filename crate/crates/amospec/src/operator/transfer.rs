//! Renormalized transfer-matrix products and the Lyapunov exponent.
//!
//! The k-step transfer matrix is the ordered product
//! `A_k(theta) = A(theta+(k-1)alpha) ... A(theta)` with one-step factor
//! `A(x) = [[E - v(x), -1], [1, 0]]`, and `A_{-k}(theta) = A_k(theta - k
//! alpha)^{-1}`. Entries grow like `e^{L k}`, so the product is carried in
//! the factored form `Q T` with `Q` orthogonal and `T` upper triangular;
//! the triangular block is renormalized into log accumulators every 64
//! steps. The factored form keeps the determinant readable at any scale:
//! `ln det` accumulates as a sum of per-step triangular logs and never
//! suffers the catastrophic cancellation that evaluating `ad - bc` on a
//! nearly rank-one stored matrix would.

use super::amo::AlmostMathieu;
use super::OperatorError;
use crate::tolerances::TRANSFER_RENORM_PERIOD;

/// A renormalized k-step transfer product.
///
/// The full product equals `e^{log_scale} * matrix` with `matrix` scaled to
/// unit Frobenius norm. `log_det` and `det_sign` track the determinant of
/// the accumulated float product; the exact value is 1, so `log_det` is
/// pure numerical drift.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferProduct {
    /// Product direction, unit Frobenius norm.
    pub matrix: [[f64; 2]; 2],
    /// Natural log of the Frobenius norm of the full product.
    pub log_scale: f64,
    /// Signed step count k.
    pub steps: i64,
    /// Accumulated ln |det| of the tracked product; exactly 0 in exact
    /// arithmetic.
    pub log_det: f64,
    /// Sign of the tracked determinant; exactly +1 in exact arithmetic.
    pub det_sign: f64,
}

impl TransferProduct {
    /// Tracked determinant, equal to 1 up to accumulated rounding drift.
    #[must_use]
    #[inline]
    pub fn det_tracked(&self) -> f64 {
        self.det_sign * self.log_det.exp()
    }

    /// ln of the Frobenius norm of the full product.
    #[must_use]
    #[inline]
    pub fn log_norm(&self) -> f64 {
        self.log_scale
    }

    /// Full product entries; overflows to infinity when `log_scale` exceeds
    /// the double range, so callers at large k should stay in log form.
    #[must_use]
    pub fn full_matrix(&self) -> [[f64; 2]; 2] {
        let s = self.log_scale.exp();
        let m = &self.matrix;
        [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
    }
}

/// Running product state in the factored form `e^a Q [[t11, t12], [0,
/// t22*e^{b-a}]]` (t-entries are block-local floats, renormalized into the
/// log accumulators `a`, `b` every [`TRANSFER_RENORM_PERIOD`] steps).
struct ProductState {
    q: [[f64; 2]; 2],
    t11: f64,
    t12: f64,
    t22: f64,
    a: f64,
    b: f64,
    /// e^{b-a}, the cross-scale weight for the t12 update.
    eab: f64,
    pending: usize,
}

impl ProductState {
    fn identity() -> Self {
        Self {
            q: [[1.0, 0.0], [0.0, 1.0]],
            t11: 1.0,
            t12: 0.0,
            t22: 1.0,
            a: 0.0,
            b: 0.0,
            eab: 1.0,
            pending: 0,
        }
    }

    /// Left-multiplies by `A = [[c, -1], [1, 0]]` and re-factors with one
    /// Givens rotation.
    fn step(&mut self, c: f64) {
        let q = &self.q;
        // B = A * Q.
        let b00 = c * q[0][0] - q[1][0];
        let b01 = c * q[0][1] - q[1][1];
        let b10 = q[0][0];
        let b11 = q[0][1];
        // Givens rotation zeroing B[1][0]; r > 0 because (B00, B10) extends
        // the first column of an orthogonal matrix.
        let r = b00.hypot(b10);
        let cs = b00 / r;
        let sn = b10 / r;
        let s12 = cs * b01 + sn * b11;
        let s22 = cs * b11 - sn * b01;
        self.t12 = r * self.t12 + s12 * (self.t22 * self.eab);
        self.t11 *= r;
        self.t22 *= s22;
        self.q = [[cs, -sn], [sn, cs]];
        self.pending += 1;
        if self.pending == TRANSFER_RENORM_PERIOD {
            self.renormalize();
        }
    }

    fn renormalize(&mut self) {
        self.a += self.t11.ln();
        self.t12 /= self.t11;
        self.t11 = 1.0;
        self.b += self.t22.abs().ln();
        self.t22 = self.t22.signum();
        self.eab = (self.b - self.a).exp();
        self.pending = 0;
    }

    /// (a_final, b_final, sign, w = t12/t11) after flushing the block.
    fn flush(&self) -> (f64, f64, f64, f64) {
        let af = self.a + self.t11.ln();
        let bf = self.b + self.t22.abs().ln();
        (af, bf, self.t22.signum(), self.t12 / self.t11)
    }

    /// ln of the Frobenius norm of the current product.
    fn log_frobenius(&self) -> f64 {
        let t22_scaled = self.t22 * self.eab;
        self.a
            + 0.5
                * (self.t11 * self.t11 + self.t12 * self.t12 + t22_scaled * t22_scaled).ln()
    }

    fn into_forward(self, steps: i64) -> TransferProduct {
        let (af, bf, sign, w) = self.flush();
        let u = sign * (bf - af).exp();
        // M = Q * [[1, w], [0, u]], then scale columns to unit Frobenius.
        let q = &self.q;
        let m = [
            [q[0][0], q[0][0] * w + q[0][1] * u],
            [q[1][0], q[1][0] * w + q[1][1] * u],
        ];
        let frob = (1.0 + w * w + u * u).sqrt();
        TransferProduct {
            matrix: [
                [m[0][0] / frob, m[0][1] / frob],
                [m[1][0] / frob, m[1][1] / frob],
            ],
            log_scale: af + frob.ln(),
            steps,
            log_det: af + bf,
            det_sign: sign,
        }
    }

    fn into_inverse(self, steps: i64) -> TransferProduct {
        let (af, bf, sign, w) = self.flush();
        // M^{-1} = e^{-b} [[e^{b-a}, -w*s], [0, s]] Q^T.
        let u = (bf - af).exp();
        let q = &self.q;
        let n = [
            [u * q[0][0] - w * sign * q[0][1], u * q[1][0] - w * sign * q[1][1]],
            [sign * q[0][1], sign * q[1][1]],
        ];
        let frob = (u * u + w * w + 1.0).sqrt();
        TransferProduct {
            matrix: [
                [n[0][0] / frob, n[0][1] / frob],
                [n[1][0] / frob, n[1][1] / frob],
            ],
            log_scale: -bf + frob.ln(),
            steps,
            log_det: -(af + bf),
            det_sign: sign,
        }
    }
}

/// Renormalized k-step transfer product `A_k` at base phase `theta_start`.
///
/// Negative k gives `A_{-|k|}(theta) = A_{|k|}(theta - |k| alpha)^{-1}`,
/// evaluated from the same exact phase stream and inverted in factored
/// form. `k = 0` returns the identity.
pub fn transfer_product(
    op: &AlmostMathieu,
    e: f64,
    theta_start: f64,
    k: i64,
) -> Result<TransferProduct, OperatorError> {
    if !e.is_finite() {
        return Err(OperatorError::NonfiniteArgument {
            name: "e",
            value: e,
        });
    }
    if k.unsigned_abs() > 100_000_000 {
        return Err(OperatorError::StepLimit { k });
    }
    let n_fwd = k.unsigned_abs();
    let n_start = if k >= 0 { 0 } else { k };
    let mut state = ProductState::identity();
    for phase in op.phase_stream_from(theta_start, n_start)?.take(n_fwd as usize) {
        state.step(e - op.potential(phase));
    }
    if k >= 0 {
        Ok(state.into_forward(k))
    } else {
        Ok(state.into_inverse(k))
    }
}

/// Finite-orbit Lyapunov estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    /// (1/n) ln ||A_n|| over a single orbit started at the operator phase.
    pub value: f64,
    /// Absolute difference between the first-half and second-half averages,
    /// a convergence proxy for the Birkhoff average.
    pub split_half_dev: f64,
    /// Orbit length used.
    pub n_steps: i64,
}

/// Single-orbit Birkhoff estimate of the Lyapunov exponent L(E).
///
/// Unique ergodicity of the irrational rotation makes the single-orbit
/// average converge to the phase-space integral; the split-half deviation
/// reports how far along that convergence the chosen orbit length is.
pub fn lyapunov(
    op: &AlmostMathieu,
    e: f64,
    n_steps: i64,
) -> Result<LyapunovEstimate, OperatorError> {
    if !e.is_finite() {
        return Err(OperatorError::NonfiniteArgument {
            name: "e",
            value: e,
        });
    }
    if n_steps < 1000 {
        return Err(OperatorError::TooFewSteps { n_steps });
    }
    let mut state = ProductState::identity();
    let half = n_steps / 2;
    let mut log_half = 0.0;
    for (j, phase) in op.phase_stream(0).take(n_steps as usize).enumerate() {
        state.step(e - op.potential(phase));
        if j as i64 + 1 == half {
            log_half = state.log_frobenius();
        }
    }
    let log_full = state.log_frobenius();
    let h1 = log_half / half as f64;
    let h2 = (log_full - log_half) / (n_steps - half) as f64;
    Ok(LyapunovEstimate {
        value: log_full / n_steps as f64,
        split_half_dev: (h1 - h2).abs(),
        n_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Frequency;

    fn golden_op(lambda: f64, theta: f64) -> AlmostMathieu {
        let f = Frequency::synthesize(0.0, 100_000).unwrap();
        AlmostMathieu::new(lambda, f, theta).unwrap()
    }

    fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ]
    }

    fn frob(m: &[[f64; 2]; 2]) -> f64 {
        (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
    }

    #[test]
    fn one_step_matches_definition() {
        let op = golden_op(0.7, 0.3);
        let e = 0.9;
        let p = transfer_product(&op, e, op.theta(), 1).unwrap();
        let full = p.full_matrix();
        let want = [[e - op.potential_at(0), -1.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (full[i][j] - want[i][j]).abs() < 1e-12 * frob(&want),
                    "entry ({i},{j}): {} vs {}",
                    full[i][j],
                    want[i][j]
                );
            }
        }
        assert_eq!(p.steps, 1);
    }

    #[test]
    fn zero_steps_is_identity() {
        let op = golden_op(1.0, 0.1);
        let p = transfer_product(&op, 0.5, 0.2, 0).unwrap();
        assert_eq!(p.log_scale, std::f64::consts::SQRT_2.ln());
        assert!((p.full_matrix()[0][0] - 1.0).abs() < 1e-15);
        assert!((p.full_matrix()[0][1]).abs() < 1e-15);
        assert_eq!(p.det_tracked(), 1.0);
    }

    #[test]
    fn det_tracked_stays_near_one_for_long_hyperbolic_products() {
        let op = golden_op(2.0, 0.37);
        let k = 100_000_i64;
        let p = transfer_product(&op, 1.3, op.theta(), k).unwrap();
        // log_scale ~ L*k with L >= ln 2, far beyond direct det recovery.
        assert!(p.log_scale > 0.5 * k as f64);
        assert!(p.det_sign > 0.0);
        assert!(
            (p.det_tracked() - 1.0).abs() <= 1e-9 * k as f64,
            "det drift {} at k = {k}",
            p.det_tracked() - 1.0
        );
    }

    #[test]
    fn step_limit_enforced() {
        let op = golden_op(1.0, 0.0);
        assert!(matches!(
            transfer_product(&op, 0.0, 0.0, 100_000_001),
            Err(OperatorError::StepLimit { .. })
        ));
        assert!(matches!(
            transfer_product(&op, f64::NAN, 0.0, 10),
            Err(OperatorError::NonfiniteArgument { .. })
        ));
    }

    #[test]
    fn cocycle_composition_holds() {
        for (lambda, e, j, k) in [(1.5, 2.0, 618_i64, 382_i64), (0.5, -1.1, 1000, 1000)] {
            let op = golden_op(lambda, 0.21);
            let lhs = transfer_product(&op, e, op.theta(), j + k).unwrap();
            let pj = transfer_product(&op, e, op.theta(), j).unwrap();
            let pk = transfer_product(&op, e, op.phase_at(j), k).unwrap();
            let m = matmul(&pk.matrix, &pj.matrix);
            let log_rhs = pk.log_scale + pj.log_scale + frob(&m).ln();
            let tol = 1e-8 * lhs.log_scale.abs().max(1.0);
            assert!(
                (log_rhs - lhs.log_scale).abs() <= tol,
                "log-scale mismatch: {log_rhs} vs {}",
                lhs.log_scale
            );
            let f = frob(&m);
            for (i, l) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                assert!(
                    (m[i][l] / f - lhs.matrix[i][l]).abs() <= 1e-8,
                    "direction mismatch at ({i},{l})"
                );
            }
        }
    }

    #[test]
    fn inverse_undoes_forward_product() {
        // Conditioning limits the float-checkable window: the residual of
        // A_{-k}(theta) A_k(theta-k alpha) - I scales like cond(A_k) times
        // the phase rounding, so the hyperbolic case uses a short window.
        for (lambda, e, k) in [(0.4, 0.3, 500_i64), (2.0, 1.1, 8)] {
            let op = golden_op(lambda, 0.43);
            let p_neg = transfer_product(&op, e, op.theta(), -k).unwrap();
            let p_fwd = transfer_product(&op, e, op.phase_at(-k), k).unwrap();
            let m = matmul(&p_neg.matrix, &p_fwd.matrix);
            let scale = (p_neg.log_scale + p_fwd.log_scale).exp();
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (m[i][j] * scale - want).abs() <= 1e-8,
                    "lambda={lambda} k={k}: entry ({i},{j}) = {}",
                    m[i][j] * scale
                );
            }
        }
    }

    #[test]
    fn negative_step_det_also_tracked() {
        let op = golden_op(1.8, 0.11);
        let p = transfer_product(&op, 0.9, op.theta(), -50_000).unwrap();
        assert!((p.det_tracked() - 1.0).abs() <= 1e-9 * 5e4);
    }

    #[test]
    fn lyapunov_free_rotation_is_zero() {
        let op = golden_op(0.0, 0.2);
        let est = lyapunov(&op, 0.0, 10_000).unwrap();
        assert!(est.value.abs() <= 0.01, "free rotation gave {}", est.value);
    }

    #[test]
    fn lyapunov_large_energy_asymptotics() {
        let op = golden_op(1.0, 0.6);
        let est = lyapunov(&op, 100.0, 20_000).unwrap();
        let want = 100.0_f64.ln();
        assert!(
            (est.value - want).abs() <= 0.05 * want,
            "L = {} vs ln 100 = {want}",
            est.value
        );
    }

    #[test]
    fn lyapunov_theta_resampling_invariance() {
        // theta-a.e. constancy of the limit: two orbits agree within 0.02.
        let f = Frequency::synthesize(0.0, 100_000).unwrap();
        let op1 = AlmostMathieu::new(3.0, f.clone(), 0.13).unwrap();
        let op2 = AlmostMathieu::new(3.0, f, 0.77).unwrap();
        let l1 = lyapunov(&op1, 0.5, 200_000).unwrap();
        let l2 = lyapunov(&op2, 0.5, 200_000).unwrap();
        assert!(
            (l1.value - l2.value).abs() <= 0.02,
            "theta=0.13 gave {}, theta=0.77 gave {}",
            l1.value,
            l2.value
        );
        assert!(l1.split_half_dev <= 0.02);
        // Herman's subharmonicity bound L >= ln lambda.
        assert!(l1.value >= 3.0_f64.ln() - 0.02);
    }

    #[test]
    fn lyapunov_rejects_short_orbits() {
        let op = golden_op(1.0, 0.0);
        assert!(matches!(
            lyapunov(&op, 0.0, 999),
            Err(OperatorError::TooFewSteps { .. })
        ));
    }
}
