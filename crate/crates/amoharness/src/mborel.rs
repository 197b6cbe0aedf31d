//! Measure-layer verification: the inequality suite over the synthetic
//! measure family, the degenerate single-atom branch, and a biased-Cantor
//! moment dimension against its closed form.

use amospec::measure::{
    dimension_report, multifractal_dims, theorem_suite_check, DiscreteMeasure, ScaleGrid,
};

use crate::config::ExperimentConfig;
use crate::report::{CheckLine, Provenance, VerificationReport};
use crate::HarnessError;

/// Left weight of the biased Cantor example.
const BIASED_LEFT: f64 = 0.3;

/// Closed-form Renyi dimension D(q) of the self-similar Cantor measure
/// with contraction 1/3 and branch weights (p, 1-p):
/// ln(p^q + (1-p)^q) / ((q - 1) ln(1/3)).
fn cantor_renyi_dim(p: f64, q: f64) -> f64 {
    (p.powf(q) + (1.0 - p).powf(q)).ln() / ((q - 1.0) * (1.0f64 / 3.0).ln())
}

/// Runs the measure-suite invariants and the two branch examples; every
/// inequality is soft (the underlying statements are asymptotic), while
/// the single-atom degenerate branch is a hard identity.
pub fn run_verify_mborel(config: &ExperimentConfig) -> Result<VerificationReport, HarnessError> {
    config.validate()?;
    let mut report = VerificationReport::new("verify-mborel", config.clone());

    let suite = report.time("theorem_suite_check", || theorem_suite_check(config.seed))?;
    for m in &suite.measures {
        let worst_point = m
            .points
            .iter()
            .map(|p| p.gamma_plus_bound_margin.min(p.gamma_minus_sigma_margin))
            .fold(f64::INFINITY, f64::min);
        report.push(
            CheckLine::soft_at_least(
                format!("suite/{}: worst pointwise margin", m.name),
                worst_point,
                0.0,
                0.0,
                Provenance::Computed,
            )
            .with_note(format!(
                "slack {} already applied inside the suite over {} sample points",
                suite.slack,
                m.points.len()
            )),
        );
        for c in &m.moment_checks {
            report.push(
                CheckLine::soft_at_most(
                    format!("suite/{}: D_plus(q={}) vs sigma bound", m.name, c.q),
                    c.d_plus_hat,
                    c.sigma_ref,
                    suite.slack,
                    Provenance::Computed,
                ),
            );
        }
    }

    // Degenerate branch: a single atom has all four dimension estimates
    // exactly zero at every scale; this is an algebraic identity of the
    // estimators, so the gate is hard.
    let grid = config.scale_grid()?;
    let atom = DiscreteMeasure::single_atom(0.3)?;
    let dims = report.time("single_atom_dimension_report", || {
        dimension_report(&atom, &grid, &config.q_list, config.m, 8, config.seed)
    })?;
    let worst = [
        dims.dim_h_plus_hat,
        dims.dim_h_minus_hat,
        dims.dim_p_plus_hat,
        dims.dim_p_minus_hat,
    ]
    .into_iter()
    .fold(0.0f64, |a, d| a.max(d.abs()));
    report.push(CheckLine::hard_at_most(
        "single atom: max |dimension estimate|",
        worst,
        0.0,
        1e-12,
        Provenance::Computed,
    ));

    // Biased Cantor: moment dimension against the self-similar closed form.
    let cantor = DiscreteMeasure::cantor(12, BIASED_LEFT)?;
    let cantor_grid = ScaleGrid::from_base_powers(3.0, 3, 9)?;
    let d2 = cantor_renyi_dim(BIASED_LEFT, 2.0);
    let est = report.time("biased_cantor_multifractal", || {
        multifractal_dims(&cantor, 2.0, &cantor_grid)
    })?;
    let lns = |eps: f64| eps.ln();
    let (w_lo, w_hi) = (
        lns(cantor_grid.eps_values()[cantor_grid.len() - 1]),
        lns(cantor_grid.eps_values()[cantor_grid.tail_start()]),
    );
    report.push(
        CheckLine::soft_at_most(
            "cantor(0.3): D_plus(2) vs closed form",
            est.d_plus_hat,
            d2,
            config.slack.dimension,
            Provenance::Computed,
        )
        .with_scale_window(w_lo, w_hi),
    );
    report.push(
        CheckLine::soft_at_least(
            "cantor(0.3): D_minus(2) vs closed form",
            est.d_minus_hat,
            d2,
            config.slack.dimension,
            Provenance::Computed,
        )
        .with_scale_window(w_lo, w_hi),
    );
    report.push_trace(
        "cantor(0.3) renyi per-scale (ln eps, ln S)",
        est.per_scale.clone(),
    );

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ExperimentConfig {
        serde_json::from_value(serde_json::json!({
            "id": "mborel-test",
            "frequency": {"kind": "synthesize", "beta_target": 0.0, "q_cap": 1000},
            "lambda": 1.0,
            "theta": 0.0,
            "truncation": 10,
            "grid": {"base": 2.0, "j_min": 1, "j_max": 6},
            "seed": 7
        }))
        .unwrap()
    }

    #[test]
    fn closed_form_matches_balanced_special_case() {
        // p = 1/2 collapses to ln 2 / ln 3 for every q.
        let d = cantor_renyi_dim(0.5, 2.0);
        assert!((d - 2.0f64.ln() / 3.0f64.ln()).abs() < 1e-14);
        // Biased value is strictly smaller.
        assert!(cantor_renyi_dim(0.3, 2.0) < d);
    }

    #[test]
    fn report_contains_all_sections_and_passes_hard() {
        let r = run_verify_mborel(&config()).unwrap();
        assert!(r.pass, "hard checks failed:\n{}", r.summary());
        assert!(r.checks.iter().any(|c| c.name.starts_with("suite/")));
        assert!(r.checks.iter().any(|c| c.name.starts_with("single atom")));
        assert!(r.checks.iter().any(|c| c.name.starts_with("cantor(0.3)")));
        assert_eq!(r.traces.len(), 1);
        assert!(r.timings.len() >= 3);
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let mut c = config();
        c.m = -1.0;
        assert!(matches!(
            run_verify_mborel(&c),
            Err(HarnessError::Config(_))
        ));
    }
}
