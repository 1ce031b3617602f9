//! Cyclic Jacobi eigendecomposition for symmetric matrices.
//!
//! Dependency-free and accurate at the sizes this crate handles; rotations
//! are applied until the off-diagonal Frobenius norm falls below 1e-12
//! relative to the matrix scale, capped at 100 sweeps.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

const SWEEP_CAP: usize = 100;
const OFF_TOL: f64 = 1e-12;

/// Decomposes B = Q diag(lambda) Q^T with eigenvalues sorted descending;
/// columns of Q are the matching eigenvectors.
pub fn sym_eigen(b: &SymMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = b.dim();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let mut a: Vec<Vec<f64>> = b.rows();
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = b.max_abs().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..SWEEP_CAP {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apq = a[p][r];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * apq);
                // tangent of the rotation angle, smaller root for stability
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
                for row in q.iter_mut() {
                    let qkp = row[p];
                    let qkr = row[r];
                    row[p] = c * qkp - s * qkr;
                    row[r] = s * qkp + c * qkr;
                }
            }
        }
    }
    if !converged {
        // final check after the last sweep
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() > OFF_TOL * scale {
            return Err(Error::ConvergenceFailure(SWEEP_CAP));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let mut vectors = vec![vec![0.0; n]; n];
    for (col_out, &col_in) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row][col_out] = q[row][col_in];
        }
    }
    Ok((eigenvalues, vectors))
}

/// Eigenvalues only, sorted descending.
pub fn eigenvalues(b: &SymMatrix) -> Result<Vec<f64>> {
    Ok(sym_eigen(b)?.0)
}
