//! The eps-uniformity predicate for node sets on the circle: Lagrange
//! basis products at Chebyshev sample points.
//!
//! A set of k+1 phases is eps-uniform when
//! `max_x max_i prod_{j != i} |x - cos 2 pi theta_j| / |cos 2 pi theta_i -
//! cos 2 pi theta_j| < e^{k eps}`, the maximum over x taken on [-1, 1].
//! The continuous maximum is approximated on a Chebyshev-distributed grid
//! of `8 (k+1)` points plus the endpoints; the products are evaluated as
//! log sums.

use std::f64::consts::{PI, TAU};

use super::OperatorError;
use crate::tolerances::UNIFORMITY_GRID_MULT;

/// Coincidence tolerance for node cosines, absolute on [-1, 1].
const NODE_COINCIDENCE_TOL: f64 = 1e-14;

/// Checks eps-uniformity of a phase set; returns the verdict and the grid
/// maximum of the Lagrange products.
pub fn uniformity_check(
    theta_set: &[f64],
    eps: f64,
    k: usize,
) -> Result<(bool, f64), OperatorError> {
    if theta_set.len() != k + 1 {
        return Err(OperatorError::BadNodeCount {
            need: k + 1,
            got: theta_set.len(),
        });
    }
    if !eps.is_finite() {
        return Err(OperatorError::NonfiniteArgument {
            name: "eps",
            value: eps,
        });
    }
    for &t in theta_set {
        if !t.is_finite() {
            return Err(OperatorError::NonfiniteArgument {
                name: "theta_set entry",
                value: t,
            });
        }
    }
    let cosines: Vec<f64> = theta_set.iter().map(|&t| (TAU * t).cos()).collect();
    for i in 0..cosines.len() {
        for j in i + 1..cosines.len() {
            if (cosines[i] - cosines[j]).abs() <= NODE_COINCIDENCE_TOL {
                return Err(OperatorError::DegenerateNodes { i, j });
            }
        }
    }
    // Per-node log denominators sum_{j != i} ln |c_i - c_j|.
    let log_denoms: Vec<f64> = (0..cosines.len())
        .map(|i| {
            cosines
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &c)| (cosines[i] - c).abs().ln())
                .sum()
        })
        .collect();
    let m = UNIFORMITY_GRID_MULT * (k + 1);
    let grid = (0..m)
        .map(|idx| (PI * (2.0 * idx as f64 + 1.0) / (2.0 * m as f64)).cos())
        .chain([-1.0, 1.0]);
    let mut max_log = f64::NEG_INFINITY;
    for x in grid {
        let diffs: Vec<f64> = cosines.iter().map(|&c| x - c).collect();
        match diffs.iter().position(|&d| d == 0.0) {
            Some(hit) => {
                // x sits exactly on node `hit`: only that node's product is
                // nonzero; evaluate it without the shared-sum shortcut.
                let log_num: f64 = diffs
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != hit)
                    .map(|(_, &d)| d.abs().ln())
                    .sum();
                max_log = max_log.max(log_num - log_denoms[hit]);
            }
            None => {
                let total: f64 = diffs.iter().map(|&d| d.abs().ln()).sum();
                for (i, &d) in diffs.iter().enumerate() {
                    max_log = max_log.max(total - d.abs().ln() - log_denoms[i]);
                }
            }
        }
    }
    Ok((max_log < k as f64 * eps, max_log.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_hand_case() {
        // cos values {-1/2, 1/2}: the grid endpoints realize the maximum
        // |1 - (-1/2)| / |1/2 - (-1/2)| = 3/2.
        let nodes = [1.0 / 3.0, 1.0 / 6.0];
        let (uniform, max_product) = uniformity_check(&nodes, 2.0_f64.ln(), 1).unwrap();
        assert!((max_product - 1.5).abs() < 1e-12, "max {max_product}");
        assert!(uniform, "threshold e^{{ln 2}} = 2 > 3/2");
        let (tight, _) = uniformity_check(&nodes, 1.4_f64.ln(), 1).unwrap();
        assert!(!tight, "threshold 1.4 < 3/2");
    }

    #[test]
    fn coincident_cosines_rejected() {
        // cos(2 pi 0.2) = cos(2 pi 0.8).
        let nodes = [0.2, 0.8];
        assert!(matches!(
            uniformity_check(&nodes, 1.0, 1),
            Err(OperatorError::DegenerateNodes { .. })
        ));
    }

    #[test]
    fn chebyshev_extrema_are_ln4_uniform() {
        for k in [20usize, 40] {
            let nodes: Vec<f64> = (0..=k).map(|j| j as f64 / (2.0 * k as f64)).collect();
            let (uniform, max_product) = uniformity_check(&nodes, 4.0_f64.ln(), k).unwrap();
            assert!(
                uniform,
                "k = {k}: extrema nodes gave max product {max_product}"
            );
            assert!(max_product >= 1.0);
        }
    }

    #[test]
    fn node_count_must_match() {
        assert!(matches!(
            uniformity_check(&[0.1, 0.2, 0.3], 1.0, 1),
            Err(OperatorError::BadNodeCount { need: 2, got: 3 })
        ));
    }

    #[test]
    fn grid_hit_on_node_is_finite() {
        // theta = 0 puts a node cosine exactly at the endpoint x = 1.
        let nodes = [0.0, 0.25, 0.5];
        let (_, max_product) = uniformity_check(&nodes, 1.0, 2).unwrap();
        assert!(max_product.is_finite() && max_product > 0.0);
    }
}
