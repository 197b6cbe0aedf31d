//! Verification reports: per-check lines carrying measured value, bound,
//! slack, direction, and provenance, plus named traces and timings.
//!
//! Reports serialize with deterministic field order; the canonical form
//! zeroes wall-clock timings so identical config and seed reproduce
//! identical bytes.

use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::HarnessError;

/// Outcome of one reported check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// Hard check held.
    Pass,
    /// Hard check failed; the run exits nonzero.
    Fail,
    /// Soft comparison held within slack.
    SoftPass,
    /// Soft comparison missed its slack; downgraded to a warning.
    SoftFail,
    /// Check not applicable here; see the note.
    Skipped,
}

impl CheckStatus {
    /// Fixed-width label for summaries and CSV.
    #[must_use]
    pub fn label(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "FAIL",
            Self::SoftPass => "soft-pass",
            Self::SoftFail => "soft-FAIL",
            Self::Skipped => "skipped",
        }
    }
}

/// Direction of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// measured <= bound + slack.
    AtMost,
    /// measured >= bound - slack.
    AtLeast,
}

impl Direction {
    #[must_use]
    pub fn label(self) -> &'static str {
        match self {
            Self::AtMost => "at_most",
            Self::AtLeast => "at_least",
        }
    }
}

/// Where the bound of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the configuration.
    Config,
    /// Computed during the run.
    Computed,
}

impl Provenance {
    #[must_use]
    pub fn label(self) -> &'static str {
        match self {
            Self::Config => "config",
            Self::Computed => "computed",
        }
    }
}

/// One asserted number with its tolerance and provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub status: CheckStatus,
    /// The measured quantity; NaN when skipped.
    pub measured: f64,
    /// The bound it is compared against.
    pub bound: f64,
    pub direction: Direction,
    /// Additive slack (soft checks) or tolerance (hard checks).
    pub slack: f64,
    /// Signed margin in the passing direction; nonnegative means held.
    pub margin: f64,
    /// Provenance of the bound; measured values are always computed and
    /// slacks always come from config (or the stated defaults).
    pub bound_provenance: Provenance,
    /// ln(eps) window (low, high) the measurement used, when scale-resolved.
    pub scale_window: Option<(f64, f64)>,
    pub note: Option<String>,
}

impl CheckLine {
    fn build(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        direction: Direction,
        slack: f64,
        provenance: Provenance,
        hard: bool,
    ) -> Self {
        let margin = match direction {
            Direction::AtMost => bound + slack - measured,
            Direction::AtLeast => measured - (bound - slack),
        };
        let held = margin >= 0.0;
        let status = match (hard, held) {
            (true, true) => CheckStatus::Pass,
            (true, false) => CheckStatus::Fail,
            (false, true) => CheckStatus::SoftPass,
            (false, false) => CheckStatus::SoftFail,
        };
        Self {
            name: name.into(),
            status,
            measured,
            bound,
            direction,
            slack,
            margin,
            bound_provenance: provenance,
            scale_window: None,
            note: None,
        }
    }

    /// Hard check measured <= bound + tolerance.
    #[must_use]
    pub fn hard_at_most(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(name, measured, bound, Direction::AtMost, tolerance, provenance, true)
    }

    /// Hard check measured >= bound - tolerance.
    #[must_use]
    pub fn hard_at_least(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(name, measured, bound, Direction::AtLeast, tolerance, provenance, true)
    }

    /// Soft check measured <= bound + slack.
    #[must_use]
    pub fn soft_at_most(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        slack: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(name, measured, bound, Direction::AtMost, slack, provenance, false)
    }

    /// Soft check measured >= bound - slack.
    #[must_use]
    pub fn soft_at_least(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        slack: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(name, measured, bound, Direction::AtLeast, slack, provenance, false)
    }

    /// A check that did not apply; the note says why.
    #[must_use]
    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Skipped,
            measured: f64::NAN,
            bound: f64::NAN,
            direction: Direction::AtMost,
            slack: 0.0,
            margin: f64::NAN,
            bound_provenance: Provenance::Computed,
            scale_window: None,
            note: Some(note.into()),
        }
    }

    /// Attaches the ln(eps) window the measurement used.
    #[must_use]
    pub fn with_scale_window(mut self, low: f64, high: f64) -> Self {
        self.scale_window = Some((low, high));
        self
    }

    /// Attaches a free-form note.
    #[must_use]
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// One human-readable summary line.
    #[must_use]
    pub fn summary(&self) -> String {
        if self.status == CheckStatus::Skipped {
            return format!(
                "[{:9}] {} ({})",
                self.status.label(),
                self.name,
                self.note.as_deref().unwrap_or("")
            );
        }
        let rel = match self.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        let mut line = format!(
            "[{:9}] {}: measured {:.6} {} {:.6} (slack {:.3}, margin {:+.4}, bound {})",
            self.status.label(),
            self.name,
            self.measured,
            rel,
            self.bound,
            self.slack,
            self.margin,
            self.bound_provenance.label(),
        );
        if let Some(note) = &self.note {
            line.push_str(" -- ");
            line.push_str(note);
        }
        line
    }
}

/// A named (x, y) series backing a check, exported verbatim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Wall-clock duration of one pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub name: String,
    pub seconds: f64,
}

/// Full record of one run: inputs echo, check lines, traces, timings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Experiment id from the config.
    pub experiment: String,
    /// Which pipeline produced this report.
    pub kind: String,
    /// Echo of the configuration that drove the run.
    pub inputs: ExperimentConfig,
    pub checks: Vec<CheckLine>,
    pub traces: Vec<Trace>,
    pub timings: Vec<Timing>,
    /// True when no hard check failed.
    pub pass: bool,
    /// True when additionally no soft check missed its slack.
    pub soft_pass: bool,
}

impl VerificationReport {
    /// Empty report for a pipeline about to run.
    #[must_use]
    pub fn new(kind: &str, inputs: ExperimentConfig) -> Self {
        Self {
            experiment: inputs.id.clone(),
            kind: kind.to_string(),
            inputs,
            checks: Vec::new(),
            traces: Vec::new(),
            timings: Vec::new(),
            pass: true,
            soft_pass: true,
        }
    }

    /// Appends a check line and folds it into the pass flags.
    pub fn push(&mut self, line: CheckLine) {
        match line.status {
            CheckStatus::Fail => {
                self.pass = false;
                self.soft_pass = false;
            }
            CheckStatus::SoftFail => self.soft_pass = false,
            _ => {}
        }
        self.checks.push(line);
    }

    /// Appends a named trace.
    pub fn push_trace(&mut self, name: impl Into<String>, points: Vec<(f64, f64)>) {
        self.traces.push(Trace {
            name: name.into(),
            points,
        });
    }

    /// Runs a stage and records its wall-clock time.
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    /// Process exit code: 0 when all hard checks held, 1 otherwise. Soft
    /// misses are warnings and never fail the process.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.pass)
    }

    /// JSON bytes with timings zeroed: identical config and seed yield
    /// identical canonical bytes.
    pub fn canonical_json(&self) -> Result<String, HarnessError> {
        let mut copy = self.clone();
        for t in &mut copy.timings {
            t.seconds = 0.0;
        }
        crate::export::json_17(&copy)
    }

    /// Human-readable summary: one line per check plus a verdict.
    #[must_use]
    pub fn summary(&self) -> String {
        let mut out = format!("{} `{}`\n", self.kind, self.experiment);
        for c in &self.checks {
            out.push_str(&c.summary());
            out.push('\n');
        }
        for t in &self.timings {
            out.push_str(&format!("  timing {}: {:.2} s\n", t.name, t.seconds));
        }
        out.push_str(&format!(
            "verdict: hard {}, soft {}\n",
            if self.pass { "pass" } else { "FAIL" },
            if self.soft_pass { "pass" } else { "FAIL (warnings above)" },
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ExperimentConfig {
        serde_json::from_value(serde_json::json!({
            "id": "r",
            "frequency": {"kind": "synthesize", "beta_target": 0.0, "q_cap": 1000},
            "lambda": 1.0,
            "theta": 0.0,
            "truncation": 10,
            "grid": {"base": 2.0, "j_min": 1, "j_max": 5}
        }))
        .unwrap()
    }

    #[test]
    fn margins_and_statuses_follow_direction() {
        let l = CheckLine::soft_at_most("a", 0.5, 0.6, 0.1, Provenance::Computed);
        assert_eq!(l.status, CheckStatus::SoftPass);
        assert!((l.margin - 0.2).abs() < 1e-15);
        let l = CheckLine::soft_at_most("b", 0.9, 0.6, 0.1, Provenance::Computed);
        assert_eq!(l.status, CheckStatus::SoftFail);
        let l = CheckLine::hard_at_least("c", 0.9, 0.8, 0.0, Provenance::Config);
        assert_eq!(l.status, CheckStatus::Pass);
        assert!((l.margin - 0.1).abs() < 1e-15);
        let l = CheckLine::hard_at_most("d", 2.0, 1.0, 0.5, Provenance::Config);
        assert_eq!(l.status, CheckStatus::Fail);
    }

    #[test]
    fn pass_flags_fold_over_pushed_lines() {
        let mut r = VerificationReport::new("test", config());
        r.push(CheckLine::soft_at_most("s", 0.0, 1.0, 0.0, Provenance::Computed));
        assert!(r.pass && r.soft_pass);
        r.push(CheckLine::soft_at_most("s2", 2.0, 1.0, 0.0, Provenance::Computed));
        assert!(r.pass && !r.soft_pass);
        assert_eq!(r.exit_code(), 0);
        r.push(CheckLine::hard_at_most("h", 2.0, 1.0, 0.0, Provenance::Computed));
        assert!(!r.pass);
        assert_eq!(r.exit_code(), 1);
        r.push(CheckLine::skipped("sk", "not applicable"));
        assert_eq!(r.checks.len(), 4);
    }

    #[test]
    fn canonical_json_ignores_timings() {
        let mut a = VerificationReport::new("test", config());
        let mut b = VerificationReport::new("test", config());
        a.time("stage", || std::thread::sleep(std::time::Duration::from_millis(2)));
        b.time("stage", || ());
        a.push(CheckLine::soft_at_most("s", 0.25, 1.0, 0.0, Provenance::Computed));
        b.push(CheckLine::soft_at_most("s", 0.25, 1.0, 0.0, Provenance::Computed));
        assert_ne!(a.timings[0].seconds, b.timings[0].seconds);
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }

    #[test]
    fn summary_mentions_every_check() {
        let mut r = VerificationReport::new("test", config());
        r.push(CheckLine::soft_at_least("fraction", 0.9, 0.8, 0.0, Provenance::Config));
        r.push(CheckLine::skipped("window n=2", "empty window"));
        let s = r.summary();
        assert!(s.contains("fraction") && s.contains("empty window"));
        assert!(s.contains("verdict: hard pass"));
    }
}
