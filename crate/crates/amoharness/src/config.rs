//! Experiment configuration: one JSON document drives every pipeline.
//!
//! Every precondition of the operations a run will invoke is checkable from
//! the config alone via [`ExperimentConfig::validate`]; the seed makes runs
//! bit-reproducible. A machine-readable schema ships in `schema/`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use amospec::arith::DiophantineParams;
use amospec::measure::ScaleGrid;
use amospec::tolerances::{DEFAULT_DECAY_SLACK, DEFAULT_DIM_SLACK};
use amospec::{AlmostMathieu, Frequency};

use crate::HarnessError;

/// How the frequency alpha is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrequencySpec {
    /// Continued-fraction expansion of a high-precision decimal literal,
    /// for up to `n_max` partial quotients.
    Expand { decimal: String, n_max: usize },
    /// Quotients synthesized so the finite-scale resonance strength
    /// beta_hat lands near `beta_target`, with denominators capped.
    Synthesize { beta_target: f64, q_cap: u64 },
}

/// Scale grid eps_j = base^{-j} for j in [j_min, j_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub base: f64,
    pub j_min: u32,
    pub j_max: u32,
}

/// Slack and decay-exponent parameters; everything has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlackSpec {
    /// Additive slack for soft dimension comparisons.
    pub dimension: f64,
    /// Additive slack on the decay rate inside window checks.
    pub decay: f64,
    /// Resonance exponent t1; when absent, the operator-layer default.
    pub t1: Option<f64>,
    /// Resonance exponent t2; when absent, the operator-layer default.
    pub t2: Option<f64>,
}

impl Default for SlackSpec {
    fn default() -> Self {
        Self {
            dimension: DEFAULT_DIM_SLACK,
            decay: DEFAULT_DECAY_SLACK,
            t1: None,
            t2: None,
        }
    }
}

/// Diophantine scan parameters for the phase precondition
/// dist(2 theta - k alpha, Z) >= kappa / k^nu, 0 < k <= k_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiophantineSpec {
    pub kappa: f64,
    pub nu: f64,
    pub k_max: u64,
}

impl Default for DiophantineSpec {
    fn default() -> Self {
        Self {
            kappa: 0.01,
            nu: 2.0,
            k_max: 10_000,
        }
    }
}

impl DiophantineSpec {
    /// The operator-layer parameter struct.
    #[must_use]
    pub fn params(&self) -> DiophantineParams {
        DiophantineParams {
            kappa: self.kappa,
            nu: self.nu,
            k_max: self.k_max,
        }
    }
}

/// Eigenvector selection and scoring for the localization pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationSpec {
    /// Resonance scale indices n to check; empty means every n the
    /// frequency expansion supports.
    pub n_list: Vec<usize>,
    /// How many mid-spectrum eigenvectors to select.
    pub n_vectors: usize,
    /// Largest |site| at which a selected eigenvector may peak: the decay
    /// profile is renormalized at sites {0, 1}, so vectors peaked far away
    /// carry no origin-anchored information.
    pub peak_cap: i64,
    /// Safety factor on the eigensolver noise floor below which profile
    /// entries are treated as unresolved (set to zero, with a note).
    pub clamp_safety: f64,
    /// Soft floor for the per-scale resonant-site pass fraction.
    pub pass_fraction_floor: f64,
}

impl Default for LocalizationSpec {
    fn default() -> Self {
        Self {
            n_list: Vec::new(),
            n_vectors: 12,
            peak_cap: 10,
            clamp_safety: 10.0,
            pass_fraction_floor: 0.8,
        }
    }
}

/// Output destinations; when absent the CLI falls back to stdout only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Report destination for verify/localization runs.
    pub report: Option<PathBuf>,
    /// Measure destination for runs that build one.
    pub measure: Option<PathBuf>,
    /// Overwrite existing outputs instead of erroring.
    pub force: bool,
}

fn default_q_list() -> Vec<f64> {
    vec![1.5, 2.0]
}

fn default_m() -> f64 {
    2.0
}

fn default_n_samples() -> usize {
    200
}

/// One experiment: frequency, coupling, phase, truncation, estimator
/// parameters, and slacks. See `schema/config.schema.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment identifier echoed into reports and filenames.
    pub id: String,
    pub frequency: FrequencySpec,
    /// Coupling lambda >= 0 of the almost Mathieu operator.
    pub lambda: f64,
    /// Phase offset theta.
    pub theta: f64,
    /// Truncation half-width N: finite-volume windows are [-N, N].
    pub truncation: i64,
    pub grid: GridSpec,
    /// Moment orders for Renyi dimension estimates (each q > 1).
    #[serde(default = "default_q_list")]
    pub q_list: Vec<f64>,
    /// m-Borel exponent.
    #[serde(default = "default_m")]
    pub m: f64,
    /// Sample points drawn per measure for pointwise exponents.
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    /// RNG seed; identical seed and config reproduce report bytes.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub slack: SlackSpec,
    #[serde(default)]
    pub diophantine: DiophantineSpec,
    #[serde(default)]
    pub localization: LocalizationSpec,
    /// Energy for the lyapunov subcommand; defaults to 0.
    #[serde(default)]
    pub energy: Option<f64>,
    /// Orbit length for the lyapunov subcommand; defaults to 10^6.
    #[serde(default)]
    pub lyapunov_steps: Option<i64>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// Loads and validates a JSON config file.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every precondition derivable from the config alone.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.id.is_empty() {
            return fail("id must be nonempty".into());
        }
        match &self.frequency {
            FrequencySpec::Expand { decimal, n_max } => {
                if decimal.is_empty() || *n_max < 2 {
                    return fail("frequency.expand needs a decimal and n_max >= 2".into());
                }
            }
            FrequencySpec::Synthesize { beta_target, q_cap } => {
                if !(beta_target.is_finite() && *beta_target >= 0.0) || *q_cap < 2 {
                    return fail(format!(
                        "frequency.synthesize needs finite beta_target >= 0 and q_cap >= 2, \
                         got {beta_target} and {q_cap}"
                    ));
                }
            }
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return fail(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if !self.theta.is_finite() {
            return fail(format!("theta must be finite, got {}", self.theta));
        }
        if self.truncation < 1 {
            return fail(format!("truncation must be >= 1, got {}", self.truncation));
        }
        if !(self.grid.base.is_finite() && self.grid.base > 1.0) {
            return fail(format!("grid.base must exceed 1, got {}", self.grid.base));
        }
        if self.grid.j_max < self.grid.j_min || self.grid.j_max - self.grid.j_min < 3 {
            return fail(format!(
                "grid needs j_max >= j_min + 3, got [{}, {}]",
                self.grid.j_min, self.grid.j_max
            ));
        }
        if self.q_list.iter().any(|q| !(q.is_finite() && *q > 1.0)) {
            return fail(format!("q_list entries must be finite and > 1, got {:?}", self.q_list));
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return fail(format!("m must be finite and positive, got {}", self.m));
        }
        if self.n_samples == 0 {
            return fail("n_samples must be positive".into());
        }
        for (name, v) in [
            ("slack.dimension", self.slack.dimension),
            ("slack.decay", self.slack.decay),
        ] {
            if !(v.is_finite() && (0.0..1.0).contains(&v)) {
                return fail(format!("{name} must lie in [0, 1), got {v}"));
            }
        }
        if let (Some(t1), Some(t2)) = (self.slack.t1, self.slack.t2) {
            if !(t1 > 0.0 && t1 < t2 && t2 < 1.0) {
                return fail(format!("need 0 < t1 < t2 < 1, got t1 = {t1}, t2 = {t2}"));
            }
        }
        for (name, t) in [("t1", self.slack.t1), ("t2", self.slack.t2)] {
            if let Some(t) = t {
                if !(t.is_finite() && t > 0.0 && t < 1.0) {
                    return fail(format!("slack.{name} must lie in (0, 1), got {t}"));
                }
            }
        }
        if !(self.diophantine.kappa.is_finite() && self.diophantine.kappa > 0.0)
            || !(self.diophantine.nu.is_finite() && self.diophantine.nu >= 0.0)
            || self.diophantine.k_max == 0
        {
            return fail(format!(
                "diophantine needs kappa > 0, nu >= 0, k_max >= 1, got {:?}",
                self.diophantine
            ));
        }
        let loc = &self.localization;
        if loc.n_vectors == 0
            || loc.peak_cap < 0
            || !(loc.clamp_safety.is_finite() && loc.clamp_safety >= 1.0)
            || !(loc.pass_fraction_floor.is_finite()
                && (0.0..=1.0).contains(&loc.pass_fraction_floor))
        {
            return fail(format!("localization parameters out of range: {loc:?}"));
        }
        if let Some(n) = self.lyapunov_steps {
            if n < 1 {
                return fail(format!("lyapunov_steps must be >= 1, got {n}"));
            }
        }
        if let Some(e) = self.energy {
            if !e.is_finite() {
                return fail(format!("energy must be finite, got {e}"));
            }
        }
        Ok(())
    }

    /// Builds the frequency from its spec.
    pub fn frequency(&self) -> Result<Frequency, HarnessError> {
        let f = match &self.frequency {
            FrequencySpec::Expand { decimal, n_max } => Frequency::expand_decimal(decimal, *n_max),
            FrequencySpec::Synthesize { beta_target, q_cap } => {
                Frequency::synthesize(*beta_target, *q_cap)
            }
        };
        f.map_err(|e| HarnessError::Config(format!("frequency: {e}")))
    }

    /// Builds the operator from frequency, lambda, and theta.
    pub fn operator(&self) -> Result<AlmostMathieu, HarnessError> {
        Ok(AlmostMathieu::new(self.lambda, self.frequency()?, self.theta)?)
    }

    /// Builds the scale grid.
    pub fn scale_grid(&self) -> Result<ScaleGrid<f64>, HarnessError> {
        Ok(ScaleGrid::from_base_powers(
            self.grid.base,
            self.grid.j_min,
            self.grid.j_max,
        )?)
    }

    /// Replaces the seed (CLI override).
    #[must_use]
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            id: "t".into(),
            frequency: FrequencySpec::Synthesize {
                beta_target: 0.0,
                q_cap: 100_000,
            },
            lambda: 1.0,
            theta: 0.0,
            truncation: 50,
            grid: GridSpec {
                base: 2.0,
                j_min: 1,
                j_max: 6,
            },
            q_list: default_q_list(),
            m: 2.0,
            n_samples: 10,
            seed: 0,
            slack: SlackSpec::default(),
            diophantine: DiophantineSpec::default(),
            localization: LocalizationSpec::default(),
            energy: None,
            lyapunov_steps: None,
            output: OutputSpec::default(),
        }
    }

    #[test]
    fn valid_config_builds_everything() {
        let c = base();
        c.validate().unwrap();
        let f = c.frequency().unwrap();
        assert!(f.n_convergents() > 5);
        let op = c.operator().unwrap();
        assert_eq!(op.coupling(), 1.0);
        assert_eq!(c.scale_grid().unwrap().len(), 6);
    }

    #[test]
    fn validation_rejects_each_bad_field() {
        let mut c = base();
        c.lambda = f64::NAN;
        assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
        let mut c = base();
        c.truncation = 0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.grid.j_max = c.grid.j_min + 1;
        assert!(c.validate().is_err());
        let mut c = base();
        c.q_list = vec![0.5];
        assert!(c.validate().is_err());
        let mut c = base();
        c.slack.t1 = Some(0.9);
        c.slack.t2 = Some(0.3);
        assert!(c.validate().is_err());
        let mut c = base();
        c.localization.n_vectors = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip_preserves_config() {
        let c = base();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"id": "x", "unknown_knob": 3}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn defaults_fill_optional_sections() {
        let text = r#"{
            "id": "minimal",
            "frequency": {"kind": "synthesize", "beta_target": 1.0, "q_cap": 10000},
            "lambda": 2.0,
            "theta": 0.0,
            "truncation": 100,
            "grid": {"base": 2.0, "j_min": 1, "j_max": 8}
        }"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.q_list, vec![1.5, 2.0]);
        assert_eq!(c.m, 2.0);
        assert_eq!(c.seed, 0);
        assert_eq!(c.localization.peak_cap, 10);
        assert_eq!(c.diophantine.k_max, 10_000);
        assert!(!c.output.force);
    }
}
