//! Window determinants P_k, Cramer-rule Green entries, and the (t,k)
//! regularity scan.
//!
//! `P_k(theta)` is the characteristic determinant `det(E I - H)` of the
//! operator restricted to a k-site window whose first site carries phase
//! `theta`. It satisfies the three-term recurrence
//! `P_k = (E - v(theta+(k-1)alpha)) P_{k-1} - P_{k-2}` with `P_0 = 1`,
//! carried here in renormalized log form. Green function magnitudes on a
//! window `[x1, x2]` are ratios of such determinants.

use super::amo::AlmostMathieu;
use super::OperatorError;
use crate::tolerances::{PK_ZERO_REL, TRANSFER_RENORM_PERIOD};

/// Log-domain window determinant: `P_k = sign * e^{log_abs}`.
///
/// `sign == 0` flags a determinant that cancelled to zero within
/// [`PK_ZERO_REL`] of its final recurrence operands, meaning E is an
/// eigenvalue of the window restriction to working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PkDet {
    pub log_abs: f64,
    pub sign: i8,
}

impl PkDet {
    const UNIT: Self = Self {
        log_abs: 0.0,
        sign: 1,
    };
}

/// Determinant P_k of the k-site window starting at phase `theta`,
/// by the renormalized three-term recurrence.
pub fn pk_det(op: &AlmostMathieu, e: f64, theta: f64, k: i64) -> Result<PkDet, OperatorError> {
    if !e.is_finite() {
        return Err(OperatorError::NonfiniteArgument {
            name: "e",
            value: e,
        });
    }
    if k < 1 {
        return Err(OperatorError::BadDetOrder { k });
    }
    // Seed (P_{-1}, P_0) = (0, 1); every step is then the uniform update
    // P_{j+1} = c P_j - P_{j-1}.
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut log_scale = 0.0_f64;
    let mut cancel_base = 0.0_f64;
    let mut since_renorm = 0usize;
    for phase in op.phase_stream_from(theta, 0)?.take(k as usize) {
        let c = e - op.potential(phase);
        cancel_base = (c * cur).abs() + prev.abs();
        let next = c * cur - prev;
        prev = cur;
        cur = next;
        since_renorm += 1;
        if since_renorm == TRANSFER_RENORM_PERIOD {
            let s = cur.abs().max(prev.abs());
            if s > 0.0 {
                cur /= s;
                prev /= s;
                log_scale += s.ln();
                cancel_base /= s;
            }
            since_renorm = 0;
        }
    }
    if cur == 0.0 || cur.abs() <= PK_ZERO_REL * cancel_base {
        return Ok(PkDet {
            log_abs: f64::NEG_INFINITY,
            sign: 0,
        });
    }
    Ok(PkDet {
        log_abs: log_scale + cur.abs().ln(),
        sign: if cur > 0.0 { 1 } else { -1 },
    })
}

/// Cramer-rule Green magnitudes on the window `[x1, x2]` at the operator's
/// own phase: returns `(ln |G(x1, y)|, ln |G(y, x2)|)` where G is the
/// inverse of `E I - H` restricted to the window.
pub fn green_entry(
    op: &AlmostMathieu,
    e: f64,
    x1: i64,
    x2: i64,
    y: i64,
) -> Result<(f64, f64), OperatorError> {
    if !(x1 <= y && y <= x2) {
        return Err(OperatorError::BadGreenSites { x1, y, x2 });
    }
    let k = x2 - x1 + 1;
    let den = pk_det(op, e, op.phase_at(x1), k)?;
    if den.sign == 0 {
        return Err(OperatorError::EigenvalueHit);
    }
    let num_right = if x2 == y {
        PkDet::UNIT
    } else {
        pk_det(op, e, op.phase_at(y + 1), x2 - y)?
    };
    let num_left = if y == x1 {
        PkDet::UNIT
    } else {
        pk_det(op, e, op.phase_at(x1), y - x1)?
    };
    Ok((
        num_right.log_abs - den.log_abs,
        num_left.log_abs - den.log_abs,
    ))
}

/// Scans windows of length k around y for a (t,k)-regularity witness:
/// a window `[x1, x2]`, `x2 = x1 + k - 1`, with both `|G(x1,y)| <=
/// e^{-t(y-x1)}` and `|G(y,x2)| <= e^{-t(x2-y)}` and both distances at
/// least k/5.
///
/// All admissible x1 are scanned in ascending order and the first witness
/// is returned; windows where E hits an eigenvalue of the restriction are
/// skipped, since a singular window cannot witness regularity.
pub fn regularity_check(
    op: &AlmostMathieu,
    e: f64,
    y: i64,
    t: f64,
    k: i64,
) -> Result<(bool, Option<(i64, i64)>), OperatorError> {
    if k < 10 {
        return Err(OperatorError::WindowTooSmall { k });
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(OperatorError::NonfiniteArgument {
            name: "t",
            value: t,
        });
    }
    let margin = (k + 4) / 5; // ceil(k/5) as an integer distance
    let lo = y - (k - 1) + margin;
    let hi = y - margin;
    for x1 in lo..=hi {
        let x2 = x1 + k - 1;
        let (log_left, log_right) = match green_entry(op, e, x1, x2, y) {
            Ok(pair) => pair,
            Err(OperatorError::EigenvalueHit) => continue,
            Err(other) => return Err(other),
        };
        let d_left = (y - x1) as f64;
        let d_right = (x2 - y) as f64;
        if log_left <= -t * d_left && log_right <= -t * d_right {
            return Ok((true, Some((x1, x2))));
        }
    }
    Ok((false, None))
}
