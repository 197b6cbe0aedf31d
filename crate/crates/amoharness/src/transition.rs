//! Transition verification: dimension estimates of a finite-volume
//! spectral measure against the closed-form subcritical bounds.
//!
//! The packing bound is assembled two independent ways -- through the
//! m-Borel exponent route with m = 2 and directly -- and their agreement
//! is a hard gate; the comparisons of measured dimensions against the
//! bounds are soft, because the bounds are asymptotic statements and a
//! finite truncation can exceed them within finite-size error.

use amospec::measure::{
    bound_case2_packing, bound_thm12_multifractal, bound_thm_gamma_plus, dimension_report,
};
use amospec::spectral::{eigensolve, spectral_measure, TruncatedOperator};
use amospec::{AlmostMathieu, Measure64};

use crate::config::ExperimentConfig;
use crate::report::{CheckLine, Provenance, VerificationReport};
use crate::HarnessError;

/// Tolerance for treating ln lambda = beta_hat as the Case-1 boundary.
const CASE1_EQ_TOL: f64 = 1e-12;

/// Smallest moment order the multifractal bound covers.
const Q_BOUND_MIN: f64 = 1.5;

/// Builds the site spectral measure mu_{delta_0} + mu_{delta_1} of the
/// symmetric truncation, returning it with the eigenbasis completeness
/// defect at the two sites (an exactness witness for the measure).
pub fn site_spectral_measure(
    op: &AlmostMathieu,
    n_half: i64,
) -> Result<(Measure64, f64), HarnessError> {
    let t = TruncatedOperator::symmetric(op, n_half)?;
    let data = eigensolve(&t, &[0, 1])?;
    let defect = data
        .completeness_defect(0)?
        .max(data.completeness_defect(1)?);
    let mu0 = spectral_measure(&data, &[(0, 1.0)])?;
    let mu1 = spectral_measure(&data, &[(1, 1.0)])?;
    let mut atoms = mu0.to_atoms();
    atoms.extend(mu1.to_atoms());
    Ok((Measure64::from_atoms(atoms)?, defect))
}

/// Checks the regime preconditions and runs the transition pipeline.
pub fn run_verify_transition(
    config: &ExperimentConfig,
) -> Result<VerificationReport, HarnessError> {
    config.validate()?;
    let freq = config.frequency()?;
    let beta = freq
        .beta(0)
        .map_err(|e| HarnessError::Config(format!("beta estimate: {e}")))?;
    let log_lambda = config.lambda.ln();
    if !(log_lambda > 0.0) {
        return Err(HarnessError::Config(format!(
            "transition checks need lambda > 1 (coupling in the transition regime), got {}",
            config.lambda
        )));
    }
    let case1 = (log_lambda - beta.value).abs() <= CASE1_EQ_TOL;
    if log_lambda > beta.value && !case1 {
        return Err(HarnessError::Refused(format!(
            "ln lambda = {log_lambda:.6} exceeds beta_hat = {:.6}: supercritical pure-point \
             regime, outside the transition bounds (use the localization pipeline instead)",
            beta.value
        )));
    }
    let op = AlmostMathieu::new(config.lambda, freq, config.theta)?;
    let dio = op
        .freq()
        .diophantine_check(op.theta_exact(), &config.diophantine.params());
    if !dio.holds {
        return Err(HarnessError::Refused(format!(
            "theta fails the Diophantine condition kappa/k^nu at k = {:?} (margin {:.4}); \
             tighten kappa or pick a different phase",
            dio.worst_k, dio.worst_margin
        )));
    }

    let mut report = VerificationReport::new("verify-transition", config.clone());
    report.push(
        CheckLine::hard_at_least(
            "pre: Diophantine margin of theta",
            dio.worst_margin,
            1.0,
            0.0,
            Provenance::Config,
        )
        .with_note(format!(
            "kappa = {}, nu = {}, k_max = {}; worst k = {:?}",
            config.diophantine.kappa, config.diophantine.nu, config.diophantine.k_max, dio.worst_k
        )),
    );

    let (mu, defect) = report.time("spectral measure", || {
        site_spectral_measure(&op, config.truncation)
    })?;
    report.push(CheckLine::hard_at_most(
        "eigenbasis completeness defect at sites {0, 1}",
        defect,
        0.0,
        1e-6,
        Provenance::Computed,
    ));
    report.push(CheckLine::hard_at_most(
        "total mass of mu_{delta_0} + mu_{delta_1} vs 2",
        (mu.total_mass() - 2.0).abs(),
        0.0,
        1e-6,
        Provenance::Computed,
    ));

    let grid = config.scale_grid()?;
    let dims = report.time("dimension_report", || {
        dimension_report(
            &mu,
            &grid,
            &config.q_list,
            config.m,
            config.n_samples,
            config.seed,
        )
    })?;

    // The packing bound through the m-Borel route (m = 2, gamma_minus = 0,
    // sigma = the multifractal bound value) must agree with the direct
    // closed form: an oracle equivalence, hence hard.
    let sigma_bound = bound_thm12_multifractal(beta.value, log_lambda)?;
    let packing_bound = bound_thm_gamma_plus(2.0, sigma_bound, 0.0)?;
    let packing_direct = bound_case2_packing(beta.value, log_lambda)?;
    report.push(
        CheckLine::hard_at_most(
            "packing bound route agreement (m-Borel route vs direct)",
            (packing_bound - packing_direct).abs(),
            0.0,
            1e-12,
            Provenance::Computed,
        )
        .with_note(format!(
            "beta_hat = {:.6}, ln lambda = {log_lambda:.6}",
            beta.value
        )),
    );

    let tail = grid.eps_values()[grid.tail_start()].ln();
    let finest = grid.eps_values()[grid.len() - 1].ln();
    let case_note = if case1 {
        "Case 1 boundary ln lambda = beta_hat: bound is 0"
    } else {
        "Case 2: ln lambda < beta_hat"
    };
    report.push(
        CheckLine::soft_at_most(
            "dim_P_plus_hat vs packing bound",
            dims.dim_p_plus_hat,
            packing_bound,
            config.slack.dimension,
            Provenance::Computed,
        )
        .with_scale_window(finest, tail)
        .with_note(case_note),
    );

    for est in &dims.renyi {
        if est.q < Q_BOUND_MIN {
            report.push(CheckLine::skipped(
                format!("D_plus_hat(q={}) vs multifractal bound", est.q),
                format!("bound covers q >= {Q_BOUND_MIN} only"),
            ));
            continue;
        }
        report.push(
            CheckLine::soft_at_most(
                format!("D_plus_hat(q={}) vs multifractal bound", est.q),
                est.d_plus_hat,
                sigma_bound,
                config.slack.dimension,
                Provenance::Computed,
            )
            .with_scale_window(finest, tail),
        );
        report.push_trace(
            format!("renyi per-scale q={} (ln eps, ln S)", est.q),
            est.per_scale.clone(),
        );
    }
    report.push_trace(
        "sigma summary (liminf_hat_min, liminf_hat_max, limsup_hat_min, limsup_hat_max)",
        vec![
            (0.0, dims.sigma.liminf_hat_min),
            (1.0, dims.sigma.liminf_hat_max),
            (2.0, dims.sigma.limsup_hat_min),
            (3.0, dims.sigma.limsup_hat_max),
        ],
    );

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(lambda: f64) -> ExperimentConfig {
        serde_json::from_value(serde_json::json!({
            "id": "transition-test",
            "frequency": {"kind": "synthesize", "beta_target": 1.0, "q_cap": 10_000},
            "lambda": lambda,
            "theta": 0.0,
            "truncation": 300,
            "grid": {"base": 2.0, "j_min": 1, "j_max": 6},
            "n_samples": 40,
            "seed": 5
        }))
        .unwrap()
    }

    #[test]
    fn case2_report_computes_both_bounds() {
        let r = run_verify_transition(&config(0.7f64.exp())).unwrap();
        assert!(r.pass, "hard checks failed:\n{}", r.summary());
        let packing = r
            .checks
            .iter()
            .find(|c| c.name.starts_with("dim_P_plus_hat"))
            .unwrap();
        // beta_hat = 1.00034, ln lambda = 0.7: bound 2 (1 - 0.7 / beta).
        assert!((packing.bound - 0.6).abs() < 5e-3, "bound {}", packing.bound);
        let multi = r
            .checks
            .iter()
            .find(|c| c.name.starts_with("D_plus_hat(q=2)"))
            .unwrap();
        assert!((multi.bound - 0.4615).abs() < 5e-3, "bound {}", multi.bound);
    }

    #[test]
    fn case1_boundary_reports_zero_bound() {
        // lambda = e^{beta_hat} exactly puts the run on the Case-1 boundary.
        let beta = config(2.0).frequency().unwrap().beta(0).unwrap().value;
        let r = run_verify_transition(&config(beta.exp())).unwrap();
        let packing = r
            .checks
            .iter()
            .find(|c| c.name.starts_with("dim_P_plus_hat"))
            .unwrap();
        assert!(packing.bound.abs() <= 1e-9, "bound {}", packing.bound);
        assert!(packing.note.as_deref().unwrap().contains("Case 1"));
    }

    #[test]
    fn supercritical_is_refused() {
        let err = run_verify_transition(&config(1.5f64.exp())).unwrap_err();
        match err {
            HarnessError::Refused(why) => assert!(why.contains("pure-point")),
            other => panic!("expected refusal, got {other}"),
        }
        assert_eq!(
            run_verify_transition(&config(1.5f64.exp()))
                .unwrap_err()
                .exit_code(),
            3
        );
    }

    #[test]
    fn subcritical_coupling_below_one_is_a_config_error() {
        let err = run_verify_transition(&config(0.5)).unwrap_err();
        assert!(matches!(err, HarnessError::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_phase_fails_diophantine_and_is_refused() {
        // An unmeetable kappa makes every phase fail the scan; the run must
        // refuse before any spectral work starts.
        let mut c = config(0.7f64.exp());
        c.diophantine.kappa = 10.0;
        let err = run_verify_transition(&c).unwrap_err();
        assert!(matches!(err, HarnessError::Refused(_)));
        assert_eq!(err.exit_code(), 3);
    }
}
