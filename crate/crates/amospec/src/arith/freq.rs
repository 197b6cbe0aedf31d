//! The frequency type: an irrational alpha carried as partial quotients plus
//! exact big-integer convergents and an exact rational representative.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cf::{beta_estimate, convergents, expand_interval, expand_rational, BetaEstimate};
use super::synth::{decimal_to_rational, golden_tail_value, half_ulp, synthesize_quotients};
use super::ArithError;

/// An irrational rotation number in (0,1).
///
/// The partial quotients are a_1, a_2, ... (the integer part a_0 = 0 is
/// implicit); convergents satisfy p_{n+1} = a_{n+1} p_n + p_{n-1} and
/// likewise for q, with p_0/q_0 = 0/1. `value` is an exact rational
/// representative agreeing with the true number to the construction's
/// precision — the 200-digit decimal truncation for expanded input, the
/// golden-tail extension for synthesized quotients.
#[derive(Debug, Clone)]
pub struct Frequency {
    quotients: Vec<u64>,
    p: Vec<BigInt>,
    q: Vec<BigInt>,
    value: BigRational,
    shadow: f64,
    exhausted: bool,
}

/// Serialization form: big integers as decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyRepr {
    pub partial_quotients: Vec<u64>,
    pub shadow: f64,
    pub value_num: String,
    pub value_den: String,
    pub exhausted: bool,
}

impl Frequency {
    /// Expands a high-precision decimal literal (interpreted as value plus or
    /// minus half an ulp of its last digit) for up to `n_max` quotients.
    ///
    /// Stops early, with the exhausted flag set, once the uncertainty
    /// interval no longer pins down the next quotient.
    pub fn expand_decimal(s: &str, n_max: usize) -> Result<Self, ArithError> {
        let mid = decimal_to_rational(s)?;
        let frac_digits = s.trim().split_once('.').map_or(0, |(_, f)| f.len());
        let u = half_ulp(frac_digits);
        let (quotients, exhausted) = expand_interval(&(&mid - &u), &(&mid + &u), n_max)?;
        if quotients.is_empty() {
            return Err(ArithError::BadDecimal {
                reason: "precision exhausted before the first partial quotient".to_string(),
            });
        }
        Ok(Self::from_parts(quotients, mid, exhausted))
    }

    /// Expands an exact rational. Errors with `RationalInput` if the
    /// expansion terminates before `n_max` quotients — an exact rational has
    /// no infinite expansion to truncate.
    pub fn expand_rational(value: BigRational, n_max: usize) -> Result<Self, ArithError> {
        let quotients = expand_rational(&value, n_max)?;
        Ok(Self::from_parts(quotients, value, false))
    }

    /// Synthesizes a frequency whose beta estimate approaches `beta_target`,
    /// with convergent denominators capped at `q_cap`. The exact value is the
    /// golden-tail extension of the generated quotient prefix, so resonance
    /// and Diophantine questions remain well posed beyond the last listed
    /// denominator.
    pub fn synthesize(beta_target: f64, q_cap: u64) -> Result<Self, ArithError> {
        let quotients = synthesize_quotients(beta_target, q_cap)?;
        let (p, q) = convergents(&quotients);
        let value = golden_tail_value(&p, &q);
        let shadow = value.to_f64().expect("alpha in (0,1) fits in f64");
        Ok(Self {
            quotients,
            p,
            q,
            value,
            shadow,
            exhausted: false,
        })
    }

    fn from_parts(quotients: Vec<u64>, value: BigRational, exhausted: bool) -> Self {
        let (p, q) = convergents(&quotients);
        let shadow = value.to_f64().expect("alpha in (0,1) fits in f64");
        Self {
            quotients,
            p,
            q,
            value,
            shadow,
            exhausted,
        }
    }

    /// Partial quotients a_1, a_2, ...
    #[must_use]
    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// Convergent numerators p_0, p_1, ...
    #[must_use]
    pub fn p(&self) -> &[BigInt] {
        &self.p
    }

    /// Convergent denominators q_0, q_1, ...
    #[must_use]
    pub fn q(&self) -> &[BigInt] {
        &self.q
    }

    /// Denominator q_n as u64; panics if it does not fit (callers in the
    /// resonance analysis work below the synthesis cap, which is u64).
    #[must_use]
    pub fn q_u64(&self, n: usize) -> u64 {
        self.q[n].to_u64().expect("q_n exceeds u64 range")
    }

    /// Number of stored convergents (length of the q sequence).
    #[must_use]
    pub fn n_convergents(&self) -> usize {
        self.q.len()
    }

    /// Exact rational representative.
    #[must_use]
    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// Float shadow of the value.
    #[must_use]
    pub fn shadow(&self) -> f64 {
        self.shadow
    }

    /// Whether the decimal expansion stopped early for lack of precision.
    #[must_use]
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Finite-scale beta estimate: max over n >= tail_start of ln(q_{n+1})/q_n.
    pub fn beta(&self, tail_start: usize) -> Result<BetaEstimate, ArithError> {
        beta_estimate(&self.q, tail_start)
    }

    /// alpha/2 as an exact rational, for the theta = alpha/2 test cases.
    #[must_use]
    pub fn half_value(&self) -> BigRational {
        &self.value / BigRational::from_integer(BigInt::from(2))
    }

    /// Exact orbit phase theta + n*alpha mod 1, in [0,1).
    #[must_use]
    pub fn phase_at(&self, theta: &BigRational, n: i64) -> BigRational {
        let x = theta + BigRational::from_integer(BigInt::from(n)) * &self.value;
        let f = x.floor();
        x - f
    }

    /// Iterator over phases theta + n*alpha mod 1 for n = n_start, n_start+1,
    /// ... as f64 values.
    ///
    /// The accumulator is big-integer exact; a float fast path serves each
    /// block of 1024 steps and is resynchronized from the exact state at
    /// block boundaries, keeping the error below 2e-13 absolute.
    #[must_use]
    pub fn phase_iter(&self, theta: &BigRational, n_start: i64) -> PhaseIter {
        let d = self.value.denom().lcm(theta.denom());
        let a = (self.value.numer() * (&d / self.value.denom())).mod_floor(&d);
        let start = self.phase_at(theta, n_start);
        let r = (start.numer() * (&d / start.denom())).mod_floor(&d);
        let block_step = (&a * BigInt::from(PHASE_BLOCK)).mod_floor(&d);
        PhaseIter {
            alpha_f64: self.shadow,
            d,
            block_step,
            r,
            block_pos: 0,
            block_base: 0.0,
        }
    }

    /// Checks the Diophantine condition dist(2 theta - k alpha, Z) >= kappa/k^nu
    /// for all 0 < k <= k_max, by exact reduction.
    #[must_use]
    pub fn diophantine_check(
        &self,
        theta: &BigRational,
        params: &DiophantineParams,
    ) -> DiophantineReport {
        let two_theta = theta * BigRational::from_integer(BigInt::from(2));
        let d = self.value.denom().lcm(two_theta.denom());
        let a = (self.value.numer() * (&d / self.value.denom())).mod_floor(&d);
        let t0 = (two_theta.numer() * (&d / two_theta.denom())).mod_floor(&d);
        let mut report = DiophantineReport {
            holds: true,
            worst_k: None,
            worst_margin: f64::INFINITY,
        };
        let mut u = t0;
        for k in 1..=params.k_max {
            u = (&u - &a).mod_floor(&d);
            let dist_num = (&u).min(&(&d - &u)).clone();
            let dist = ratio_to_f64(&dist_num, &d);
            let threshold = params.kappa / (k as f64).powf(params.nu);
            let margin = dist / threshold;
            if margin < report.worst_margin {
                report.worst_margin = margin;
                report.worst_k = Some(k);
            }
            if dist < threshold {
                report.holds = false;
            }
        }
        if params.k_max == 0 {
            report.worst_margin = f64::NAN;
        }
        report
    }

    /// Serialization form with big integers as decimal strings.
    #[must_use]
    pub fn to_repr(&self) -> FrequencyRepr {
        FrequencyRepr {
            partial_quotients: self.quotients.clone(),
            shadow: self.shadow,
            value_num: self.value.numer().to_string(),
            value_den: self.value.denom().to_string(),
            exhausted: self.exhausted,
        }
    }

    /// Rebuilds a frequency from its serialization form.
    pub fn from_repr(repr: &FrequencyRepr) -> Result<Self, ArithError> {
        let num: BigInt = repr.value_num.parse().map_err(|_| ArithError::BadDecimal {
            reason: "value_num does not parse as an integer".to_string(),
        })?;
        let den: BigInt = repr.value_den.parse().map_err(|_| ArithError::BadDecimal {
            reason: "value_den does not parse as an integer".to_string(),
        })?;
        if den.is_zero() || !(num.is_positive() && den.is_positive()) {
            return Err(ArithError::AlphaOutOfRange);
        }
        let value = BigRational::new(num, den);
        if value <= BigRational::zero() || value >= BigRational::one() {
            return Err(ArithError::AlphaOutOfRange);
        }
        let mut out = Self::from_parts(repr.partial_quotients.clone(), value, repr.exhausted);
        out.shadow = repr.shadow;
        Ok(out)
    }
}

/// Exact-resync phase iterator; see [`Frequency::phase_iter`].
pub struct PhaseIter {
    alpha_f64: f64,
    d: BigInt,
    block_step: BigInt,
    r: BigInt,
    block_pos: u32,
    block_base: f64,
}

const PHASE_BLOCK: u32 = 1024;

impl Iterator for PhaseIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.block_pos == 0 {
            self.block_base = ratio_to_f64(&self.r, &self.d);
        }
        let theta = (self.block_base + self.block_pos as f64 * self.alpha_f64).rem_euclid(1.0);
        self.block_pos += 1;
        if self.block_pos == PHASE_BLOCK {
            self.r = (&self.r + &self.block_step).mod_floor(&self.d);
            self.block_pos = 0;
        }
        Some(theta)
    }
}

/// Parameters of the Diophantine condition dist(2 theta - k alpha, Z) >= kappa/|k|^nu.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiophantineParams {
    pub kappa: f64,
    pub nu: f64,
    pub k_max: u64,
}

/// Result of a Diophantine scan: the k minimizing dist * k^nu / kappa.
#[derive(Debug, Clone, Serialize)]
pub struct DiophantineReport {
    pub holds: bool,
    pub worst_k: Option<u64>,
    pub worst_margin: f64,
}

/// num/den as f64 for nonnegative big integers with den > 0, accurate even
/// when both exceed f64 range.
fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    BigRational::new(num.clone(), den.clone())
        .to_f64()
        .expect("ratio of positive big integers converts to f64")
}
