//! Synthesis of frequencies with a prescribed resonance strength beta.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::ArithError;
use crate::tolerances::CF_SYNTH_RAMP_THRESHOLD;

/// The golden ratio (1+sqrt5)/2 to 205 digits, used to extend a synthesized
/// quotient prefix by its all-ones tail so the frequency has an exact rational
/// representative far beyond the listed convergents.
const PHI_205: &str = "1.6180339887498948482045868343656381177203091798057628621354486227052604628189024497072072041893911374847540880753868917521266338622235369317931800607667263544333890865959395829056383226613199282902678806752";

/// Parses a plain decimal literal into an exact rational.
pub fn decimal_to_rational(s: &str) -> Result<BigRational, ArithError> {
    let t = s.trim();
    let bad = |reason: &str| ArithError::BadDecimal {
        reason: reason.to_string(),
    };
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    let int_part = if int_part.is_empty() { "0" } else { int_part };
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
        || (int_part == "0" && frac_part.is_empty())
    {
        return Err(bad("expected digits with an optional decimal point"));
    }
    let digits: String = format!("{int_part}{frac_part}");
    let num: BigInt = digits
        .parse()
        .map_err(|_| bad("integer part does not parse"))?;
    let den = BigInt::from(10u8).pow(frac_part.len() as u32);
    Ok(BigRational::new(num, den))
}

/// Exact rational value of phi = (1+sqrt5)/2, good to 205 digits.
#[must_use]
pub fn phi_rational() -> BigRational {
    decimal_to_rational(PHI_205).expect("the phi constant parses")
}

/// Half-ulp uncertainty of a decimal literal with `frac_digits` fractional
/// digits: 1/(2 * 10^frac_digits).
#[must_use]
pub fn half_ulp(frac_digits: usize) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2) * BigInt::from(10u8).pow(frac_digits as u32))
}

/// Chooses partial quotients so that ln q_{n+1} / q_n approaches
/// `beta_target`, stopping before any denominator exceeds `q_cap`.
///
/// The exponential rule a_{n+1} = max(1, ceil(e^{beta q_n}/q_n)) only makes
/// sense once e^{beta q_n} dominates q_n; below the ramp threshold the
/// quotients stay at 1 (golden ramp), which for beta_target = 0 degenerates to
/// the golden mean as the spec's examples require.
pub fn synthesize_quotients(beta_target: f64, q_cap: u64) -> Result<Vec<u64>, ArithError> {
    if !beta_target.is_finite() || beta_target < 0.0 {
        return Err(ArithError::BadBetaTarget);
    }
    if q_cap < 2 {
        return Err(ArithError::InsufficientScales { scales: 0, q_cap });
    }
    let mut quotients: Vec<u64> = Vec::new();
    let (mut q_prev, mut q_cur) = (0u128, 1u128); // q_{-1}, q_0
    let cap = q_cap as u128;
    loop {
        let qf = q_cur as f64;
        let a: u64 = if beta_target * qf < CF_SYNTH_RAMP_THRESHOLD {
            1
        } else {
            let ln_a = beta_target * qf - qf.ln();
            if ln_a > 80.0 {
                break; // the next denominator would dwarf any practical cap
            }
            (ln_a.exp().ceil() as u64).max(1)
        };
        let q_next = a as u128 * q_cur + q_prev;
        if q_next > cap {
            break;
        }
        quotients.push(a);
        q_prev = q_cur;
        q_cur = q_next;
    }
    // ratios ln q_{n+1}/q_n exist for n = 0..len-1; require three scales
    if quotients.len() < 3 {
        return Err(ArithError::InsufficientScales {
            scales: quotients.len(),
            q_cap,
        });
    }
    Ok(quotients)
}

/// Exact rational representative of the number whose continued fraction is
/// the given prefix followed by the all-ones (golden) tail:
/// alpha = (p_N phi + p_{N-1}) / (q_N phi + q_{N-1}).
#[must_use]
pub fn golden_tail_value(p: &[BigInt], q: &[BigInt]) -> BigRational {
    let n = q.len() - 1;
    let phi = phi_rational();
    let num = BigRational::from_integer(p[n].clone()) * &phi
        + BigRational::from_integer(p[n - 1].clone());
    let den = BigRational::from_integer(q[n].clone()) * &phi
        + BigRational::from_integer(q[n - 1].clone());
    num / den
}
