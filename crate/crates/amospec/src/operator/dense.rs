//! Small dense window solvers: reference-grade LU routines used to
//! cross-check the log-domain determinant recurrence and the Cramer-rule
//! Green entries on windows of modest size (O(k^3) work, intended for
//! k up to a few thousand).

use super::amo::AlmostMathieu;

/// Dense matrix of `E I - H` restricted to window sites `x1..=x2`:
/// diagonal `E - v(theta + n alpha)`, off-diagonals -1.
#[must_use]
pub fn window_matrix(op: &AlmostMathieu, e: f64, x1: i64, x2: i64) -> Vec<Vec<f64>> {
    let k = (x2 - x1 + 1) as usize;
    let mut a = vec![vec![0.0; k]; k];
    for (row, site) in (x1..=x2).enumerate() {
        a[row][row] = e - op.potential_at(site);
        if row + 1 < k {
            a[row][row + 1] = -1.0;
            a[row + 1][row] = -1.0;
        }
    }
    a
}

/// LU factorization with partial pivoting, in place.
///
/// Returns the pivot permutation and its sign, or `None` when a pivot
/// column vanishes (singular to machine precision).
fn lu_factor(a: &mut [Vec<f64>]) -> Option<(Vec<usize>, i8)> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1i8;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty column range");
        if pivot_abs == 0.0 {
            return None;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            perm.swap(pivot_row, col);
            sign = -sign;
        }
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let pivot = &pivot_rows[col];
        for target in rest.iter_mut() {
            let factor = target[col] / pivot[col];
            target[col] = factor;
            for (t, p) in target[col + 1..].iter_mut().zip(&pivot[col + 1..]) {
                *t -= factor * p;
            }
        }
    }
    Some((perm, sign))
}

/// (ln |det A|, sign) of a dense square matrix by partial-pivot LU.
///
/// Sign 0 with log -inf signals a numerically singular matrix.
#[must_use]
pub fn dense_det_log(a: &[Vec<f64>]) -> (f64, i8) {
    let mut work: Vec<Vec<f64>> = a.to_vec();
    let Some((_, mut sign)) = lu_factor(&mut work) else {
        return (f64::NEG_INFINITY, 0);
    };
    let mut log_abs = 0.0;
    for (i, row) in work.iter().enumerate() {
        let d = row[i];
        log_abs += d.abs().ln();
        if d < 0.0 {
            sign = -sign;
        }
    }
    (log_abs, sign)
}

/// Solves `A x = b` by partial-pivot LU; `None` when singular.
#[must_use]
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    assert_eq!(b.len(), n, "rhs length must match matrix order");
    let mut work: Vec<Vec<f64>> = a.to_vec();
    let (perm, _) = lu_factor(&mut work)?;
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            x[i] -= work[i][j] * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= work[i][j] * x[j];
        }
        x[i] /= work[i][i];
    }
    Some(x)
}

/// Entry `(A^{-1})[i][j]` by solving against the j-th unit vector.
#[must_use]
pub fn dense_inverse_entry(a: &[Vec<f64>], i: usize, j: usize) -> Option<f64> {
    let n = a.len();
    let mut b = vec![0.0; n];
    b[j] = 1.0;
    dense_solve(a, &b).map(|x| x[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Frequency;

    fn golden_op(lambda: f64, theta: f64) -> AlmostMathieu {
        let f = Frequency::synthesize(0.0, 100_000).unwrap();
        AlmostMathieu::new(lambda, f, theta).unwrap()
    }

    #[test]
    fn det_of_known_matrix() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let (log_abs, sign) = dense_det_log(&a);
        assert_eq!(sign, 1);
        assert!((log_abs - 5.0_f64.ln()).abs() < 1e-14);
        let b = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let (log_abs, sign) = dense_det_log(&b);
        assert_eq!(sign, -1);
        assert!(log_abs.abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_flagged() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let (log_abs, sign) = dense_det_log(&a);
        assert_eq!(sign, 0);
        assert_eq!(log_abs, f64::NEG_INFINITY);
        assert!(dense_solve(&a, &[1.0, 0.0]).is_none());
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = vec![
            vec![4.0, -1.0, 0.0],
            vec![-1.0, 4.0, -1.0],
            vec![0.0, -1.0, 4.0],
        ];
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| a[i][j] * x_true[j]).sum())
            .collect();
        let x = dense_solve(&a, &b).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_entry_matches_solve() {
        let op = golden_op(1.3, 0.21);
        let a = window_matrix(&op, 0.4, -2, 5);
        let g = dense_inverse_entry(&a, 1, 6).unwrap();
        let col = dense_solve(&a, &{
            let mut b = vec![0.0; 8];
            b[6] = 1.0;
            b
        })
        .unwrap();
        assert!((g - col[1]).abs() < 1e-14);
    }

    #[test]
    fn window_matrix_layout() {
        let op = golden_op(0.9, 0.05);
        let a = window_matrix(&op, 1.7, 3, 6);
        assert_eq!(a.len(), 4);
        assert!((a[0][0] - (1.7 - op.potential_at(3))).abs() < 1e-15);
        assert!((a[3][3] - (1.7 - op.potential_at(6))).abs() < 1e-15);
        assert_eq!(a[0][1], -1.0);
        assert_eq!(a[1][0], -1.0);
        assert_eq!(a[0][2], 0.0);
    }
}
