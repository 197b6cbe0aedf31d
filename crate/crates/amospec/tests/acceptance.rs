//! Acceptance gate: one test per criterion, each printing a PASS line with
//! its measured runtime. Run with `--nocapture` to see the lines; a failing
//! criterion fails its test.

use std::time::Instant;

use amospec::measure::{
    borel_transform, gamma_exponents, j_scaling_exponent, m_borel, multifractal_dims,
    theorem_suite_check, DiscreteMeasure, ScaleGrid,
};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN2_OVER_LN3: f64 = 0.6309297535714574;

fn report(name: &str, start: Instant, budget_s: f64) {
    let dt = start.elapsed().as_secs_f64();
    println!("{name}: PASS ({dt:.2} s, budget {budget_s} s)");
    assert!(dt < budget_s, "{name} exceeded its runtime budget: {dt:.2} s");
}

#[test]
fn criterion_01_borel_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..1000 {
        let n = rng.random_range(1..=100);
        let atoms: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(-3.0..3.0), rng.random_range(1e-6..1.0)))
            .collect();
        let mu = DiscreteMeasure::from_atoms(atoms).unwrap();
        let x = rng.random_range(-4.0..4.0);
        let eps = 10f64.powf(rng.random_range(-8.0..0.5));
        let j = m_borel(&mu, 2.0, x, eps);
        let m_val = borel_transform(&mu, Complex::new(x, eps));
        let rhs = eps * m_val.im;
        let rel = (j - rhs).abs() / j.abs().max(rhs.abs());
        assert!(rel <= 1e-12, "case {case}: relative deviation {rel}");
    }
    report("criterion 01 m-Borel/Borel identity", start, 1.0);
}

#[test]
fn criterion_02_cantor_dimensions() {
    let start = Instant::now();
    let mu = DiscreteMeasure::cantor(12, 0.5).unwrap();
    let grid = ScaleGrid::from_base_powers(3.0, 3, 9).unwrap();
    let est = gamma_exponents(&mu, 0.25, &grid).unwrap();
    assert!(
        (est.gamma_minus_hat - LN2_OVER_LN3).abs() < 0.05,
        "gamma_minus_hat = {}",
        est.gamma_minus_hat
    );
    assert!(
        (est.gamma_plus_hat - LN2_OVER_LN3).abs() < 0.05,
        "gamma_plus_hat = {}",
        est.gamma_plus_hat
    );
    for q in [1.5, 2.0] {
        let d = multifractal_dims(&mu, q, &grid).unwrap();
        assert!(
            (d.d_minus_hat - LN2_OVER_LN3).abs() < 0.05,
            "q={q}: d_minus_hat = {}",
            d.d_minus_hat
        );
        assert!(
            (d.d_plus_hat - LN2_OVER_LN3).abs() < 0.05,
            "q={q}: d_plus_hat = {}",
            d.d_plus_hat
        );
    }
    let sig = j_scaling_exponent(&mu, 2.0, 0.25, &grid);
    assert!(
        (sig.sigma_liminf_hat - LN2_OVER_LN3).abs() < 0.07,
        "sigma_liminf_hat = {}",
        sig.sigma_liminf_hat
    );
    assert!(
        (sig.sigma_limsup_hat - LN2_OVER_LN3).abs() < 0.07,
        "sigma_limsup_hat = {}",
        sig.sigma_limsup_hat
    );
    report("criterion 02 Cantor dimensions", start, 10.0);
}

#[test]
fn criterion_03_scaling_inequalities_suite() {
    let start = Instant::now();
    let suite = theorem_suite_check(1).unwrap();
    for m in &suite.measures {
        let worst_point = m
            .points
            .iter()
            .map(|p| p.gamma_plus_bound_margin.min(p.gamma_minus_sigma_margin))
            .fold(f64::INFINITY, f64::min);
        let worst_moment = m
            .moment_checks
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min);
        println!(
            "  {}: worst point margin {worst_point:+.4}, worst moment margin {worst_moment:+.4}",
            m.name
        );
        assert!(m.pass, "measure {} failed: {m:?}", m.name);
    }
    assert!(suite.pass);
    report("criterion 03 scaling inequalities on the suite", start, 60.0);
}
