//! Subordinacy quantities: the norms a(L), b(L), the determinant quantity
//! omega(L), the length scale L(eps) with omega(L) eps = 1, and the
//! calibration check connecting them to Im m at E + i eps.
//!
//! Both basis solutions (initial data (1,0) and (0,1) on sites 0, 1) are
//! carried jointly with one per-site scale factor, so mantissas stay order
//! one at any coupling. The Gram determinant of the pair in the cutoff
//! norm is evaluated by the Cauchy-Binet expansion
//!
//!   det G = sum over site pairs n < m of w_n w_m minor(n, m)^2,
//!
//! whose terms are all nonnegative: unlike det G = G11 G22 - G12^2, the
//! expansion never cancels, so omega^2 = det G = lambda_max lambda_min is
//! reliable far beyond the condition number at which the Gram entries
//! themselves determine the determinant. Adjacent minors equal the
//! Wronskian, so det G >= L - 1 always. Pair sums run over blocks with a
//! shared scale and the block contributions merge in log space; nothing
//! here overflows at any window length or coupling.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use super::{MFunctionSolver, SpectralError};
use crate::operator::AlmostMathieu;
use crate::tolerances::{
    OMEGA_ROOT_REL_TOL, SUBORD_CAL_CONST, TRANSFER_RENORM_PERIOD,
};

/// Search cap for the bracketing phase of the L(eps) root solve.
const L_SEARCH_CAP: f64 = 1e6;

/// Both solutions of the energy-E difference equation with initial data
/// (1, 0) and (0, 1) on sites 0 and 1, stored as per-site mantissa pairs
/// against a shared per-site log scale: phi_i(n) = vi[n - lo] e^{logs[n - lo]}.
struct JointBasis {
    lo: i64,
    v1: Vec<f64>,
    v2: Vec<f64>,
    logs: Vec<f64>,
}

impl JointBasis {
    #[inline]
    fn idx(&self, site: i64) -> usize {
        (site - self.lo) as usize
    }
}

/// Builds the joint basis over `[lo, hi]`, which must contain sites 0 and 1.
fn joint_basis(
    op: &AlmostMathieu,
    e: f64,
    lo: i64,
    hi: i64,
) -> Result<JointBasis, SpectralError> {
    if !e.is_finite() {
        return Err(SpectralError::NonfiniteArgument { name: "e", value: e });
    }
    if lo > 0 || hi < 1 {
        return Err(SpectralError::BadWindow { lo, hi });
    }
    let len = (hi - lo + 1) as usize;
    let mut v1 = vec![0.0_f64; len];
    let mut v2 = vec![0.0_f64; len];
    let mut logs = vec![0.0_f64; len];
    let i0 = (-lo) as usize;
    v1[i0] = 1.0;
    v2[i0 + 1] = 1.0;

    let mut step = |i_prev: usize, i_cur: usize, i_next: usize, v: f64| -> Result<(), SpectralError> {
        let carry = (logs[i_prev] - logs[i_cur]).exp();
        let f1 = (e - v) * v1[i_cur] - carry * v1[i_prev];
        let f2 = (e - v) * v2[i_cur] - carry * v2[i_prev];
        let m = f1.abs().max(f2.abs());
        if !(m > 0.0 && m.is_finite()) {
            return Err(SpectralError::DegenerateVector {
                name: "transfer pair",
            });
        }
        v1[i_next] = f1 / m;
        v2[i_next] = f2 / m;
        logs[i_next] = logs[i_cur] + m.ln();
        Ok(())
    };

    // Forward: phi(n+1) = (e - v(n)) phi(n) - phi(n-1) for n = 1 .. hi-1.
    for (phase, n) in op.phase_stream(1).zip(1..hi) {
        let i = (n - lo) as usize;
        step(i - 1, i, i + 1, op.potential(phase))?;
    }
    // Backward: phi(n-1) = (e - v(n)) phi(n) - phi(n+1) for n = 0 .. lo+1.
    let phases: Vec<f64> = op.phase_stream(lo + 1).take((-lo) as usize).collect();
    for (phase, n) in phases.into_iter().rev().zip((lo + 1..=0).rev()) {
        let i = (n - lo) as usize;
        step(i + 1, i, i - 1, op.potential(phase))?;
    }
    Ok(JointBasis { lo, v1, v2, logs })
}

/// Weighted sites of the cutoff norm with `l_minus` sites kept on the left
/// and `l_plus` on the right: unit weights on -floor(l_minus) ..= floor(l_plus)
/// and fractional weights on the two sites beyond.
fn weighted_sites(l_minus: f64, l_plus: f64) -> Vec<(i64, f64)> {
    let lm = l_minus.floor();
    let lp = l_plus.floor();
    let mut out = Vec::with_capacity((lm + lp) as usize + 4);
    let frac_m = l_minus - lm;
    if frac_m > 0.0 {
        out.push((-(lm as i64) - 1, frac_m));
    }
    for n in -(lm as i64)..=(lp as i64) {
        out.push((n, 1.0));
    }
    let frac_p = l_plus - lp;
    if frac_p > 0.0 {
        out.push((lp as i64 + 1, frac_p));
    }
    out
}

/// A run of weighted sites rescaled to its own maximal log: entries are
/// sqrt(w_n) v_i(n) e^{log_n - bmax}, so every product of two block entries
/// is safely inside the exponent range.
struct ScaledBlock {
    t1: Vec<f64>,
    t2: Vec<f64>,
    bmax: f64,
}

fn scaled_blocks(basis: &JointBasis, sites: &[(i64, f64)]) -> Vec<ScaledBlock> {
    sites
        .chunks(TRANSFER_RENORM_PERIOD)
        .map(|chunk| {
            let bmax = chunk
                .iter()
                .map(|&(n, _)| basis.logs[basis.idx(n)])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut t1 = Vec::with_capacity(chunk.len());
            let mut t2 = Vec::with_capacity(chunk.len());
            for &(n, w) in chunk {
                let i = basis.idx(n);
                let s = w.sqrt() * (basis.logs[i] - bmax).exp();
                t1.push(s * basis.v1[i]);
                t2.push(s * basis.v2[i]);
            }
            ScaledBlock { t1, t2, bmax }
        })
        .collect()
}

/// log(sum of e^{x}) over the values, tolerating empty input and -inf.
fn logsumexp(values: &[f64]) -> f64 {
    let m = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + values
        .iter()
        .filter(|v| v.is_finite())
        .map(|&v| (v - m).exp())
        .sum::<f64>()
        .ln()
}

/// log of det G = sum over pairs of w_n w_m minor(n, m)^2 by blocked
/// Cauchy-Binet; every term is nonnegative, so no cancellation occurs.
fn log_det_cauchy_binet(blocks: &[ScaledBlock]) -> f64 {
    let contributions: Vec<f64> = (0..blocks.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let bi = &blocks[i];
            (i..blocks.len()).filter_map(move |j| {
                let bj = &blocks[j];
                let mut partial = 0.0_f64;
                if i == j {
                    for p in 0..bi.t1.len() {
                        for q in p + 1..bi.t1.len() {
                            let minor = bi.t1[p] * bi.t2[q] - bi.t2[p] * bi.t1[q];
                            partial += minor * minor;
                        }
                    }
                } else {
                    for p in 0..bi.t1.len() {
                        for q in 0..bj.t1.len() {
                            let minor = bi.t1[p] * bj.t2[q] - bi.t2[p] * bj.t1[q];
                            partial += minor * minor;
                        }
                    }
                }
                (partial > 0.0).then(|| partial.ln() + 2.0 * (bi.bmax + bj.bmax))
            })
        })
        .collect();
    logsumexp(&contributions)
}

/// log of the cutoff norm squared of c1 phi_1 + c2 phi_2 over the blocks.
fn log_quadratic(blocks: &[ScaledBlock], c1: f64, c2: f64) -> f64 {
    let contributions: Vec<f64> = blocks
        .iter()
        .filter_map(|b| {
            let partial: f64 = b
                .t1
                .iter()
                .zip(b.t2.iter())
                .map(|(&x, &y)| {
                    let u = c1 * x + c2 * y;
                    u * u
                })
                .sum();
            (partial > 0.0).then(|| partial.ln() + 2.0 * b.bmax)
        })
        .collect();
    logsumexp(&contributions)
}

/// Gram entries of the basis pair in the cutoff norm, scaled by the
/// overall factor e^{scale}: G_true = gram * e^{scale}.
fn scaled_gram(basis: &JointBasis, sites: &[(i64, f64)]) -> ([[f64; 2]; 2], f64) {
    let lmax = sites
        .iter()
        .map(|&(n, _)| basis.logs[basis.idx(n)])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut g11 = 0.0_f64;
    let mut g12 = 0.0_f64;
    let mut g22 = 0.0_f64;
    for &(n, w) in sites {
        let i = basis.idx(n);
        let s = (basis.logs[i] - lmax).exp();
        let a = s * basis.v1[i];
        let b = s * basis.v2[i];
        g11 += w * a * a;
        g12 += w * a * b;
        g22 += w * b * b;
    }
    ([[g11, g12], [g12, g22]], 2.0 * lmax)
}

/// Subordinacy data of one (energy, boundary phase, length) triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinacyData {
    /// Cutoff length L >= 2.
    pub l: f64,
    /// Boundary phase in [0, 1).
    pub x0: f64,
    /// log of a(L)^2 = |u_{x0 + 1/4}|_{L,0}^2.
    pub log_a: f64,
    /// log of b(L)^2 = |u_{x0}|_{L,0}^2.
    pub log_b: f64,
    /// log of omega(L)^2 = det G.
    pub log_omega_sq: f64,
    /// Gram entries of (phi_1, phi_2), normalized by e^{gram_log_scale}.
    pub gram: [[f64; 2]; 2],
    /// log of the scale factored out of `gram`.
    pub gram_log_scale: f64,
}

impl SubordinacyData {
    /// a(L)^2; overflows to infinity once log_a exceeds about 709.
    #[must_use]
    pub fn a_l(&self) -> f64 {
        self.log_a.exp()
    }

    /// b(L)^2; overflows to infinity once log_b exceeds about 709.
    #[must_use]
    pub fn b_l(&self) -> f64 {
        self.log_b.exp()
    }

    /// omega(L); overflows to infinity once log_omega_sq exceeds about 1418.
    #[must_use]
    pub fn omega_l(&self) -> f64 {
        (0.5 * self.log_omega_sq).exp()
    }

    /// log omega(L).
    #[must_use]
    pub fn log_omega(&self) -> f64 {
        0.5 * self.log_omega_sq
    }
}

/// Computes a(L), b(L), omega(L) and the Gram data at one length. The
/// solutions u_x = sin(2 pi x) phi_1 - cos(2 pi x) phi_2 enter through
/// b at x = x0 and a at x = x0 + 1/4, and omega^2 = det G is their
/// max times min norm squared over all x.
pub fn subordinacy_quantities(
    op: &AlmostMathieu,
    e: f64,
    x0: f64,
    l: f64,
) -> Result<SubordinacyData, SpectralError> {
    for (name, value) in [("e", e), ("x0", x0), ("l", l)] {
        if !value.is_finite() {
            return Err(SpectralError::NonfiniteArgument { name, value });
        }
    }
    if l < 2.0 {
        return Err(SpectralError::LTooSmall { l });
    }
    let hi = l.floor() as i64 + 1;
    let basis = joint_basis(op, e, 0, hi)?;
    let sites = weighted_sites(0.0, l);
    let blocks = scaled_blocks(&basis, &sites);
    let (s, c) = (TAU * x0).sin_cos();
    let log_a = log_quadratic(&blocks, c, s);
    let log_b = log_quadratic(&blocks, s, -c);
    let log_omega_sq = log_det_cauchy_binet(&blocks);
    let (gram, gram_log_scale) = scaled_gram(&basis, &sites);
    Ok(SubordinacyData {
        l,
        x0,
        log_a,
        log_b,
        log_omega_sq,
        gram,
        gram_log_scale,
    })
}

/// log of omega(L)^2 measured directly as max times min of the cutoff
/// norm squared of u_x over a uniform grid of `n_phases` phases. Grid
/// bias scales with the Gram condition number times sin^2(pi/n_phases),
/// so this oracle is sharp in mildly conditioned regimes.
pub fn omega_sq_brute_force(
    op: &AlmostMathieu,
    e: f64,
    l: f64,
    n_phases: usize,
) -> Result<f64, SpectralError> {
    if n_phases == 0 {
        return Err(SpectralError::EmptyInput { name: "n_phases" });
    }
    if !l.is_finite() || l < 2.0 {
        return Err(SpectralError::LTooSmall { l });
    }
    let hi = l.floor() as i64 + 1;
    let basis = joint_basis(op, e, 0, hi)?;
    let sites = weighted_sites(0.0, l);
    let blocks = scaled_blocks(&basis, &sites);
    let (max_log, min_log) = (0..n_phases)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 / n_phases as f64;
            let (s, c) = (TAU * x).sin_cos();
            let v = log_quadratic(&blocks, s, -c);
            (v, v)
        })
        .reduce(
            || (f64::NEG_INFINITY, f64::INFINITY),
            |a, b| (a.0.max(b.0), a.1.min(b.1)),
        );
    Ok(max_log + min_log)
}

/// L(eps): the length where omega(L) eps = 1, found by doubling then
/// bisection in log L; returns the subordinacy data at the root. Errors
/// when omega(2) already exceeds 1/eps or the cap 1e6 is reached.
#[allow(non_snake_case)]
pub fn find_L_of_eps(
    op: &AlmostMathieu,
    e: f64,
    x0: f64,
    eps: f64,
) -> Result<SubordinacyData, SpectralError> {
    if !eps.is_finite() {
        return Err(SpectralError::NonfiniteArgument {
            name: "eps",
            value: eps,
        });
    }
    if eps <= 0.0 {
        return Err(SpectralError::NotUpperHalfPlane { im: eps });
    }
    let log_eps = eps.ln();
    let within = |d: &SubordinacyData| ((d.log_omega() + log_eps).exp() - 1.0).abs() <= OMEGA_ROOT_REL_TOL;

    let d2 = subordinacy_quantities(op, e, x0, 2.0)?;
    if within(&d2) {
        return Ok(d2);
    }
    if d2.log_omega() + log_eps > 0.0 {
        return Err(SpectralError::EpsilonTooLarge {
            inv_eps: 1.0 / eps,
            omega_at_2: d2.omega_l(),
        });
    }
    let mut lo = 2.0_f64;
    let mut hi = 2.0_f64;
    loop {
        hi *= 2.0;
        if hi > L_SEARCH_CAP {
            return Err(SpectralError::BracketFailure { l_cap: L_SEARCH_CAP });
        }
        let d = subordinacy_quantities(op, e, x0, hi)?;
        if within(&d) {
            return Ok(d);
        }
        if d.log_omega() + log_eps > 0.0 {
            break;
        }
        lo = hi;
    }
    for _ in 0..100 {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        let d = subordinacy_quantities(op, e, x0, mid)?;
        if within(&d) {
            return Ok(d);
        }
        if d.log_omega() + log_eps > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(SpectralError::BracketFailure { l_cap: hi })
}

/// Outcome of the calibration Im m(E + i eps) against (1/eps)/b(L(eps)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JlBound {
    /// Energy E.
    pub e: f64,
    /// Distance eps to the real axis.
    pub eps: f64,
    /// The matching length L(eps).
    pub l_eps: f64,
    /// Measured Im m_1 at boundary phase x0, truncation ceil(30/eps).
    pub lhs: f64,
    /// (1/eps) / b(L(eps))^2 computed from the subordinacy data.
    pub rhs: f64,
    /// lhs / rhs.
    pub ratio: f64,
    /// Whether the ratio clears 1 / the calibration constant.
    pub passes_calibration: bool,
}

/// Compares Im m at E + i eps with the subordinacy prediction
/// (1/eps)/b(L(eps))^2; the two agree up to a bounded calibration factor.
pub fn jl_lower_bound_check(
    op: &AlmostMathieu,
    e: f64,
    x0: f64,
    eps: f64,
) -> Result<JlBound, SpectralError> {
    let data = find_L_of_eps(op, e, x0, eps)?;
    let rhs = (-eps.ln() - data.log_b).exp();
    let n = (30.0 / eps).ceil() as i64;
    let solver = MFunctionSolver::new(op, n)?;
    let pair = solver.evaluate(e, eps, x0)?;
    let lhs = pair.m1_tilde.im;
    let ratio = lhs / rhs;
    Ok(JlBound {
        e,
        eps,
        l_eps: data.l,
        lhs,
        rhs,
        ratio,
        passes_calibration: ratio >= 1.0 / SUBORD_CAL_CONST,
    })
}

/// Boundary phase whose solution u_x minimizes the two-sided cutoff norm
/// over [-L, L], read off the smallest eigenvector of the two-sided Gram.
pub fn boundary_phase_proxy(
    op: &AlmostMathieu,
    e: f64,
    l: f64,
) -> Result<f64, SpectralError> {
    if !l.is_finite() || l < 2.0 {
        return Err(SpectralError::LTooSmall { l });
    }
    let h = l.floor() as i64 + 1;
    let basis = joint_basis(op, e, -h, h)?;
    let sites = weighted_sites(l, l);
    let (g, _) = scaled_gram(&basis, &sites);
    let (g11, g12, g22) = (g[0][0], g[0][1], g[1][1]);
    let half_gap = 0.5 * (g11 - g22);
    let disc = (half_gap * half_gap + g12 * g12).sqrt();
    let lmin = 0.5 * (g11 + g22) - disc;
    // Eigenvector for lmin, choosing the better-conditioned expression;
    // u_x = sin(2 pi x) phi_1 - cos(2 pi x) phi_2 gives the phase via
    // (sin, -cos) parallel to (c1, c2).
    let (c1, c2) = if (lmin - g11).abs() > (lmin - g22).abs() {
        (g12, lmin - g11)
    } else {
        (lmin - g22, g12)
    };
    let (c1, c2) = if c1 == 0.0 && c2 == 0.0 {
        // Isotropic Gram: every phase minimizes; pick x = 1/4.
        (1.0, 0.0)
    } else {
        (c1, c2)
    };
    Ok((c1.atan2(-c2) / TAU).rem_euclid(1.0))
}

/// One length of the norm growth check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormGrowthPoint {
    /// Cutoff length.
    pub l: f64,
    /// Measured log omega(L).
    pub log_omega: f64,
    /// Required (1 + g) log L.
    pub bound: f64,
    /// log_omega - bound.
    pub margin: f64,
    /// Whether the margin is nonnegative.
    pub pass: bool,
}

/// Outcome of checking omega(L) >= L^{1+g} over a grid of lengths, with
/// g = log(lambda)/(2 t1 beta) minus a fixed slack of 0.1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormGrowthReport {
    /// Growth exponent 1 + g the check requires.
    pub exponent: f64,
    /// Number of lengths tested.
    pub n_points: usize,
    /// Number of lengths where the growth bound held.
    pub n_pass: usize,
    /// n_pass / n_points.
    pub pass_fraction: f64,
    /// Smallest margin over the grid.
    pub worst_margin: f64,
    /// Length attaining the worst margin.
    pub worst_l: f64,
    /// Per-length results.
    pub points: Vec<NormGrowthPoint>,
}

/// Checks the power-law lower bound omega(L) >= L^{1 + g} with
/// g = log(lambda)/(2 t1 beta) - 0.1 over a grid of lengths; requires a
/// supercritical coupling and a finite beta estimate.
pub fn norm_growth_check(
    op: &AlmostMathieu,
    e: f64,
    x0: f64,
    t1: f64,
    l_grid: &[f64],
) -> Result<NormGrowthReport, SpectralError> {
    if op.log_lambda() <= 0.0 {
        return Err(SpectralError::NotHyperbolic {
            log_lambda: op.log_lambda(),
        });
    }
    if !(t1 > 0.0 && t1 < 1.0) {
        return Err(SpectralError::TOutOfRange { t: t1, max: 1.0 });
    }
    if l_grid.is_empty() {
        return Err(SpectralError::EmptyInput { name: "l_grid" });
    }
    let beta = op
        .freq()
        .beta(0)
        .map_err(|_| SpectralError::BetaUnavailable)?
        .value;
    let g = op.log_lambda() / (2.0 * t1 * beta) - 0.1;
    let exponent = 1.0 + g;
    let mut points = Vec::with_capacity(l_grid.len());
    let mut n_pass = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut worst_l = f64::NAN;
    for &l in l_grid {
        let data = subordinacy_quantities(op, e, x0, l)?;
        let bound = exponent * l.ln();
        let margin = data.log_omega() - bound;
        let pass = margin >= 0.0;
        if pass {
            n_pass += 1;
        }
        if margin < worst_margin {
            worst_margin = margin;
            worst_l = l;
        }
        points.push(NormGrowthPoint {
            l,
            log_omega: data.log_omega(),
            bound,
            margin,
            pass,
        });
    }
    Ok(NormGrowthReport {
        exponent,
        n_points: l_grid.len(),
        n_pass,
        pass_fraction: n_pass as f64 / l_grid.len() as f64,
        worst_margin,
        worst_l,
        points,
    })
}
