//! Exact integer classification of sites against the resonance scales
//! q_n of the frequency's continued-fraction expansion.
//!
//! A site k is n-resonant when it sits within `b_n = q_n^{t2}` of a
//! nonnegative multiple of `q_n`; otherwise the verdict records the least
//! n0 with `4 q_{n-n0} <= dist(k, q_n Z)` and the largest s with
//! `4 s q_{n-n0} <= dist`. All distances are computed in big-integer
//! arithmetic; only the final comparison against `b_n` happens in floats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::OperatorError;
use crate::arith::{big_ln, Frequency};
use crate::tolerances::DEFAULT_SIGMA;

/// Resonant / nonresonant classification of a site at scale n.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum ResonanceKind {
    /// `|k - ell q_n| = |r| <= b_n` for the nearest multiple `ell >= 0`.
    Resonant { ell: i64, r: i64 },
    /// Distance exceeds `b_n`; carries the least n0 with `4 q_{n-n0} <=
    /// dist` and the largest s with `4 s q_{n-n0} <= dist`.
    NonResonant { n0: usize, s: i64 },
}

/// Verdict of [`classify_resonance`] at scale index n.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ResonanceVerdict {
    pub kind: ResonanceKind,
    /// Scale index used.
    pub n: usize,
    /// Resonance radius `q_n^{t2}`.
    pub b_n: f64,
}

/// Classifies site k at scale n with radius exponent t2.
pub fn classify_resonance(
    freq: &Frequency,
    t2: f64,
    n: usize,
    k: i64,
) -> Result<ResonanceVerdict, OperatorError> {
    if !(t2 > 0.0 && t2 < 1.0) {
        return Err(OperatorError::T2OutOfRange { t2 });
    }
    if k < 0 {
        return Err(OperatorError::NonfiniteArgument {
            name: "k (must be >= 0)",
            value: k as f64,
        });
    }
    if freq.n_convergents() <= n {
        return Err(OperatorError::MissingConvergents {
            need: n,
            have: freq.n_convergents(),
        });
    }
    let q = freq.q();
    let qn = &q[n];
    let b_n = (t2 * big_ln(qn)).exp();
    let kb = BigInt::from(k);
    let two = BigInt::from(2);
    // Nearest multiple: ell = floor((2k + q_n) / (2 q_n)) >= 0 since k >= 0.
    let ell_big = (&kb * &two + qn).div_floor(&(qn * &two));
    let r_big = &kb - &ell_big * qn;
    let dist = r_big.abs();
    let dist_f = dist.to_f64().unwrap_or(f64::INFINITY);
    if dist_f <= b_n {
        return Ok(ResonanceVerdict {
            kind: ResonanceKind::Resonant {
                ell: ell_big.to_i64().expect("ell <= k fits in i64"),
                r: r_big.to_i64().expect("|r| <= max(|k|, q_n/2 <= |k|)"),
            },
            n,
            b_n,
        });
    }
    for n0 in 1..=n {
        let four_q = &q[n - n0] * 4;
        if four_q <= dist {
            let s = dist.div_floor(&four_q);
            return Ok(ResonanceVerdict {
                kind: ResonanceKind::NonResonant {
                    n0,
                    s: s.to_i64().expect("s <= dist <= |k| fits in i64"),
                },
                n,
                b_n,
            });
        }
    }
    debug_assert!(!dist.is_zero());
    Err(OperatorError::ResonanceUndefined {
        dist: dist.to_i64().unwrap_or(i64::MAX),
    })
}

/// Default t2: midpoint of the admissible interval
/// `((9 beta - ln lambda) / (9 beta), 1)`.
///
/// This is a configuration default, not a value fixed by the analysis;
/// reports carry the value used.
#[must_use]
pub fn default_t2(beta_hat: f64, log_lambda: f64) -> f64 {
    let lower = (9.0 * beta_hat - log_lambda) / (9.0 * beta_hat);
    lower + 0.5 * (1.0 - lower)
}

/// Default t1: the rate ratio `(beta - ln lambda) / beta` plus a small
/// sigma, floored at sigma. Same caveat as [`default_t2`].
#[must_use]
pub fn default_t1(beta_hat: f64, log_lambda: f64) -> f64 {
    DEFAULT_SIGMA.max((beta_hat - log_lambda) / beta_hat + DEFAULT_SIGMA)
}
