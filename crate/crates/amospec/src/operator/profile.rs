//! Solution profiles of `Hu = Eu` on integer windows, their weighted
//! norms, the Wronskian pairing, and the resonant decay-window check.
//!
//! A profile stores renormalized site values: the true solution value is
//! `values[i] * e^{log_factors[i]}`, with the log factor frozen per site
//! at the moment the three-term recursion produced it. This keeps windows
//! with `e^{L |n|}` growth representable at any length.

use std::f64::consts::TAU;

use serde::Serialize;

use super::amo::AlmostMathieu;
use super::resonance::{classify_resonance, ResonanceKind};
use super::transfer::transfer_product;
use super::OperatorError;
use crate::arith::big_ln;
use crate::tolerances::{DECAY_FLOOR_EPS_MULT, DEFAULT_DECAY_SLACK, TRANSFER_RENORM_PERIOD};

/// A solution (or eigenvector) profile on a window `[n_min, n_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    n_min: i64,
    values: Vec<f64>,
    log_factors: Vec<f64>,
    boundary_phase: f64,
    energy: f64,
}

impl SolutionProfile {
    /// Wraps raw site samples (for example an eigenvector from a
    /// truncation) as a profile, rescaling so the boundary pair satisfies
    /// `u(0)^2 + u(1)^2 = 1` and recovering the boundary phase x from
    /// `(u(0), u(1)) = (sin 2 pi x, -cos 2 pi x)`.
    pub fn from_samples(
        n_min: i64,
        values: Vec<f64>,
        energy: f64,
    ) -> Result<Self, OperatorError> {
        let n_max = n_min + values.len() as i64 - 1;
        if n_min > 0 || n_max < 1 {
            return Err(OperatorError::WindowDoesNotCover {
                need_lo: 0,
                need_hi: 1,
                have_lo: n_min,
                have_hi: n_max,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(OperatorError::BadProfileValues);
        }
        let u0 = values[(-n_min) as usize];
        let u1 = values[(1 - n_min) as usize];
        let s = u0.hypot(u1);
        if s == 0.0 {
            return Err(OperatorError::BadProfileValues);
        }
        let scaled: Vec<f64> = values.iter().map(|v| v / s).collect();
        let boundary_phase = (u0 / s).atan2(-(u1 / s)).rem_euclid(TAU) / TAU;
        let log_factors = vec![0.0; scaled.len()];
        Ok(Self {
            n_min,
            values: scaled,
            log_factors,
            boundary_phase,
            energy,
        })
    }

    /// Window bounds `(n_min, n_max)` inclusive.
    #[must_use]
    pub fn window(&self) -> (i64, i64) {
        (self.n_min, self.n_min + self.values.len() as i64 - 1)
    }

    /// Energy the profile was built at.
    #[must_use]
    #[inline]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Boundary phase x with `(u(0), u(1)) = (sin 2 pi x, -cos 2 pi x)`.
    #[must_use]
    #[inline]
    pub fn boundary_phase(&self) -> f64 {
        self.boundary_phase
    }

    #[inline]
    fn idx(&self, n: i64) -> usize {
        let (lo, hi) = self.window();
        assert!(n >= lo && n <= hi, "site {n} outside window [{lo}, {hi}]");
        (n - self.n_min) as usize
    }

    /// Renormalized mantissa at site n.
    #[must_use]
    pub fn mantissa_at(&self, n: i64) -> f64 {
        self.values[self.idx(n)]
    }

    /// Log renormalization factor at site n.
    #[must_use]
    pub fn log_factor_at(&self, n: i64) -> f64 {
        self.log_factors[self.idx(n)]
    }

    /// ln |u(n)|; minus infinity at exact zeros.
    #[must_use]
    pub fn log_abs_at(&self, n: i64) -> f64 {
        let i = self.idx(n);
        self.values[i].abs().ln() + self.log_factors[i]
    }

    /// Materialized value `u(n)`; overflows to +-infinity when the log
    /// factor exceeds the double range.
    #[must_use]
    pub fn value_at(&self, n: i64) -> f64 {
        let i = self.idx(n);
        self.values[i] * self.log_factors[i].exp()
    }

    /// ln of the norm of the vector `(u(n+1), u(n))`.
    #[must_use]
    pub fn log_pair_norm(&self, n: i64) -> f64 {
        let a = self.log_abs_at(n + 1);
        let b = self.log_abs_at(n);
        let hi = a.max(b);
        if hi == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        hi + 0.5 * ((2.0 * (a - hi)).exp() + (2.0 * (b - hi)).exp()).ln()
    }

    /// Largest ln |u(n)| over the window.
    #[must_use]
    pub fn max_log_abs(&self) -> f64 {
        let (lo, hi) = self.window();
        (lo..=hi)
            .map(|n| self.log_abs_at(n))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst relative residual of the three-term recurrence over interior
    /// sites, after de-renormalization site by site.
    #[must_use]
    pub fn recurrence_residual(&self, op: &AlmostMathieu) -> f64 {
        let (lo, hi) = self.window();
        let mut worst = 0.0_f64;
        for n in lo + 1..hi {
            let c = self.energy - op.potential_at(n);
            let l_next = self.log_factors[self.idx(n + 1)];
            let l_cur = self.log_factors[self.idx(n)];
            let l_prev = self.log_factors[self.idx(n - 1)];
            let scale = l_next.max(l_cur).max(l_prev);
            let t_next = self.values[self.idx(n + 1)] * (l_next - scale).exp();
            let t_cur = c * self.values[self.idx(n)] * (l_cur - scale).exp();
            let t_prev = self.values[self.idx(n - 1)] * (l_prev - scale).exp();
            let base = t_next.abs().max(t_cur.abs()).max(t_prev.abs());
            if base > 0.0 {
                worst = worst.max((t_next - (t_cur - t_prev)).abs() / base);
            }
        }
        worst
    }

    /// Rows `(n, mantissa, log_factor)` for export.
    pub fn rows(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let lo = self.n_min;
        self.values
            .iter()
            .zip(self.log_factors.iter())
            .enumerate()
            .map(move |(i, (&v, &l))| (lo + i as i64, v, l))
    }
}

/// Builds the solution of `Hu = Eu` with `(u(0), u(1)) = (sin 2 pi x,
/// -cos 2 pi x)` on the given window by forward/backward three-term
/// recursion with segment renormalization.
pub fn solution_profile(
    op: &AlmostMathieu,
    e: f64,
    x: f64,
    window: (i64, i64),
) -> Result<SolutionProfile, OperatorError> {
    if !e.is_finite() {
        return Err(OperatorError::NonfiniteArgument {
            name: "e",
            value: e,
        });
    }
    if !x.is_finite() {
        return Err(OperatorError::NonfiniteArgument {
            name: "x",
            value: x,
        });
    }
    let (n_min, n_max) = window;
    if n_min > 0 || n_max < 1 {
        return Err(OperatorError::WindowDoesNotCover {
            need_lo: 0,
            need_hi: 1,
            have_lo: n_min,
            have_hi: n_max,
        });
    }
    let len = (n_max - n_min + 1) as usize;
    let mut values = vec![0.0; len];
    let mut log_factors = vec![0.0; len];
    let at = |n: i64| (n - n_min) as usize;
    let u0 = (TAU * x).sin();
    let u1 = -(TAU * x).cos();
    values[at(0)] = u0;
    values[at(1)] = u1;
    // Forward sweep: u(n+1) = (E - v(theta + n alpha)) u(n) - u(n-1),
    // phases n = 1 .. n_max-1.
    let mut prev = u0;
    let mut cur = u1;
    let mut ls = 0.0;
    let mut pending = 0usize;
    for (phase, n) in op.phase_stream(1).zip(1..n_max) {
        let c = e - op.potential(phase);
        let next = c * cur - prev;
        prev = cur;
        cur = next;
        values[at(n + 1)] = cur;
        log_factors[at(n + 1)] = ls;
        pending += 1;
        if pending == TRANSFER_RENORM_PERIOD {
            let s = cur.abs().max(prev.abs());
            if s > 0.0 {
                cur /= s;
                prev /= s;
                ls += s.ln();
            }
            pending = 0;
        }
    }
    // Backward sweep: u(n-1) = (E - v(theta + n alpha)) u(n) - u(n+1),
    // phases n = 0 down to n_min+1.
    let phases: Vec<f64> = op
        .phase_stream(n_min + 1)
        .take((-n_min) as usize)
        .collect();
    let mut above = u1;
    let mut here = u0;
    ls = 0.0;
    pending = 0;
    for (phase, n) in phases.into_iter().rev().zip((n_min + 1..=0).rev()) {
        let c = e - op.potential(phase);
        let below = c * here - above;
        above = here;
        here = below;
        values[at(n - 1)] = here;
        log_factors[at(n - 1)] = ls;
        pending += 1;
        if pending == TRANSFER_RENORM_PERIOD {
            let s = here.abs().max(above.abs());
            if s > 0.0 {
                here /= s;
                above /= s;
                ls += s.ln();
            }
            pending = 0;
        }
    }
    Ok(SolutionProfile {
        n_min,
        values,
        log_factors,
        boundary_phase: x.rem_euclid(1.0),
        energy: e,
    })
}

/// Wronskian `u_x(n) u_y(n+1) - u_x(n+1) u_y(n)` of the paired solutions
/// `u_x` and `u_y`, `y = x + 1/4`, evaluated at step n; equal to 1 for
/// every n up to rounding drift.
///
/// The pair is propagated jointly: the solution matrix satisfies
/// `U_n = A_n ... A_1 U_0`, so its determinant is the tracked transfer
/// determinant times `det U_0 = sin^2 + cos^2 = 1`. Evaluating the four
/// site values separately and combining them would cancel
/// catastrophically once the solutions grow; the joint factored form is
/// the only representation that keeps the constancy observable, and
/// rounding drift accumulates only linearly in |n|.
pub fn wronskian_det(
    op: &AlmostMathieu,
    e: f64,
    x: f64,
    n: i64,
) -> Result<f64, OperatorError> {
    let u0x = (TAU * x).sin();
    let u1x = -(TAU * x).cos();
    let y = x + 0.25;
    let u0y = (TAU * y).sin();
    let u1y = -(TAU * y).cos();
    let det_u0 = u0x * u1y - u1x * u0y;
    let p = transfer_product(op, e, op.phase_at(1), n)?;
    Ok(p.det_tracked() * det_u0)
}

/// Weighted squared norm over `[-L2, L1]` with fractional end terms:
/// `sum_{n=-[L2]}^{[L1]} u(n)^2 + (L1-[L1]) u([L1]+1)^2 +
/// (L2-[L2]) u(-[L2]-1)^2`.
pub fn norm_l1l2(profile: &SolutionProfile, l1: f64, l2: f64) -> Result<f64, OperatorError> {
    log_norm_sq_l1l2(profile, l1, l2).map(f64::exp)
}

/// ln of [`norm_l1l2`], safe when the profile grows past the double range.
pub fn log_norm_sq_l1l2(
    profile: &SolutionProfile,
    l1: f64,
    l2: f64,
) -> Result<f64, OperatorError> {
    if !(l1.is_finite() && l2.is_finite() && l1 >= 0.0 && l2 >= 0.0) {
        return Err(OperatorError::BadNormCutoffs { l1, l2 });
    }
    let need_hi = l1.ceil() as i64 + 1;
    let need_lo = -(l2.ceil() as i64) - 1;
    let (have_lo, have_hi) = profile.window();
    if need_lo < have_lo || need_hi > have_hi {
        return Err(OperatorError::WindowDoesNotCover {
            need_lo,
            need_hi,
            have_lo,
            have_hi,
        });
    }
    let f1 = l1.floor();
    let f2 = l2.floor();
    let mut terms: Vec<f64> = ((-f2 as i64)..=(f1 as i64))
        .map(|n| 2.0 * profile.log_abs_at(n))
        .collect();
    let frac1 = l1 - f1;
    if frac1 > 0.0 {
        terms.push(2.0 * profile.log_abs_at(f1 as i64 + 1) + frac1.ln());
    }
    let frac2 = l2 - f2;
    if frac2 > 0.0 {
        terms.push(2.0 * profile.log_abs_at(-(f2 as i64) - 1) + frac2.ln());
    }
    let hi = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = terms.iter().map(|&t| (t - hi).exp()).sum();
    Ok(hi + sum.ln())
}

/// Outcome of a decay-window check at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DecayOutcome {
    /// The resonant range `(2 q_n^2 q_{n+1}^{t1}, q_{n+1}^{t2})` contains
    /// no integer.
    EmptyWindow,
    /// Sites were checked; `pass_fraction` is NaN when no site in the
    /// range was resonant.
    Checked {
        pass_fraction: f64,
        n_checked: usize,
        /// Smallest margin `bound - ln |u(k)|` (positive means pass).
        worst_margin: f64,
        worst_k: Option<i64>,
    },
}

/// Report of [`decay_window_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub outcome: DecayOutcome,
    pub n: usize,
    pub t1: f64,
    pub t2: f64,
    pub slack: f64,
    /// Decay rate `ln lambda - (1 - t1) beta_hat` before slack.
    pub rate: f64,
    pub beta_hat: f64,
    pub energy: f64,
    /// Integer |k| range checked, when nonempty.
    pub window: Option<(i64, i64)>,
}

/// Decay-window check with the default slack.
pub fn decay_window_check(
    op: &AlmostMathieu,
    e: f64,
    profile: &SolutionProfile,
    t1: f64,
    t2: f64,
    n: usize,
) -> Result<DecayReport, OperatorError> {
    decay_window_check_with_slack(op, e, profile, t1, t2, n, DEFAULT_DECAY_SLACK)
}

/// Checks `ln |u(k)| <= -(rate - slack) |k|` for every resonant site k
/// with `2 q_n^2 q_{n+1}^{t1} < |k| < q_{n+1}^{t2}`, both signs, where
/// `rate = ln lambda - (1-t1) beta_hat`.
///
/// Site values below `100 eps ||u||_inf` pass unconditionally: they are
/// numerical noise of whatever produced the profile and carry no decay
/// information.
pub fn decay_window_check_with_slack(
    op: &AlmostMathieu,
    e: f64,
    profile: &SolutionProfile,
    t1: f64,
    t2: f64,
    n: usize,
    slack: f64,
) -> Result<DecayReport, OperatorError> {
    if !(t1 > 0.0 && t1 < t2 && t2 < 1.0) {
        return Err(OperatorError::BadDecayExponents { t1, t2 });
    }
    let freq = op.freq();
    let beta_hat = freq
        .beta(0)
        .map_err(|_| OperatorError::MissingConvergents {
            need: 2,
            have: freq.n_convergents(),
        })?
        .value;
    let log_lambda = op.log_lambda();
    let discount = (1.0 - t1) * beta_hat;
    let rate = log_lambda - discount;
    if rate <= 0.0 || rate.is_nan() {
        return Err(OperatorError::NonpositiveRate {
            log_lambda,
            discount,
        });
    }
    if freq.n_convergents() <= n + 1 {
        return Err(OperatorError::MissingConvergents {
            need: n + 1,
            have: freq.n_convergents(),
        });
    }
    let ln_qn = big_ln(&freq.q()[n]);
    let ln_qn1 = big_ln(&freq.q()[n + 1]);
    let lower = (2.0_f64.ln() + 2.0 * ln_qn + t1 * ln_qn1).exp();
    let upper = (t2 * ln_qn1).exp();
    let report = |outcome, window| DecayReport {
        outcome,
        n,
        t1,
        t2,
        slack,
        rate,
        beta_hat,
        energy: e,
        window,
    };
    if lower >= upper {
        return Ok(report(DecayOutcome::EmptyWindow, None));
    }
    let k_lo = lower.floor() as i64 + 1;
    let k_hi = (upper.ceil() as i64 - 1).min(1 << 40);
    if k_lo > k_hi {
        return Ok(report(DecayOutcome::EmptyWindow, None));
    }
    let (have_lo, have_hi) = profile.window();
    if -k_hi < have_lo || k_hi > have_hi {
        return Err(OperatorError::WindowDoesNotCover {
            need_lo: -k_hi,
            need_hi: k_hi,
            have_lo,
            have_hi,
        });
    }
    let floor_log = (DECAY_FLOOR_EPS_MULT * f64::EPSILON).ln() + profile.max_log_abs();
    let mut checked = 0usize;
    let mut passed = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut worst_k = None;
    for k in k_lo..=k_hi {
        let verdict = classify_resonance(freq, t2, n, k)?;
        if !matches!(verdict.kind, ResonanceKind::Resonant { .. }) {
            continue;
        }
        let bound = (-(rate - slack) * k as f64).max(floor_log);
        for site in [k, -k] {
            let margin = bound - profile.log_abs_at(site);
            checked += 1;
            if margin >= 0.0 {
                passed += 1;
            }
            if margin < worst_margin {
                worst_margin = margin;
                worst_k = Some(site);
            }
        }
    }
    let pass_fraction = if checked == 0 {
        f64::NAN
    } else {
        passed as f64 / checked as f64
    };
    Ok(report(
        DecayOutcome::Checked {
            pass_fraction,
            n_checked: checked,
            worst_margin: if checked == 0 {
                f64::NAN
            } else {
                worst_margin
            },
            worst_k,
        },
        Some((k_lo, k_hi)),
    ))
}
