//! Dense real matrices sized for desk-scale problems (N <= ~30).

use crate::error::{Error, Result};
use crate::index::MultiIndex;

/// A real symmetric matrix; symmetry is enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from row-major data, symmetrizing as (A + A^T) / 2.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both (i, j) and (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Max |entry|.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Minimum entry (signed).
    pub fn min_entry(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// The repeated-index submatrix B_I: row/column m of B appears i_m times.
    pub fn submatrix(&self, index: &MultiIndex) -> Result<SymMatrix> {
        if index.len() != self.n {
            return Err(Error::LengthMismatch {
                dim: self.n,
                len: index.len(),
            });
        }
        let mut picks = Vec::with_capacity(index.degree() as usize);
        for (m, &cnt) in index.entries().iter().enumerate() {
            for _ in 0..cnt {
                picks.push(m);
            }
        }
        let d = picks.len();
        let mut out = SymMatrix::zeros(d);
        for a in 0..d {
            for b in 0..d {
                out.data[a * d + b] = self.get(picks[a], picks[b]);
            }
        }
        Ok(out)
    }

    /// Lower-triangular Cholesky factor; retries once with a 1e-12 jitter
    /// on the diagonal before giving up.
    pub fn cholesky(&self) -> Result<Vec<f64>> {
        match self.cholesky_raw(0.0) {
            Ok(l) => Ok(l),
            Err(_) => self.cholesky_raw(1e-12),
        }
    }

    fn cholesky_raw(&self, jitter: f64) -> Result<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                if i == j {
                    s += jitter;
                }
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::CholeskyFailure);
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }
}

/// General square matrix helpers used by the state-preparation checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_sym(s: &SymMatrix) -> Self {
        Matrix {
            n: s.dim(),
            data: s.rows().concat(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            det *= a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / a[col * n + col];
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    /// Inverse via Gauss-Jordan with partial pivoting, polished by two
    /// Newton refinement steps (X <- X (2I - A X)); the refinement keeps
    /// the residual near machine precision even for condition numbers
    /// around 1e12.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = Matrix::identity(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col] == 0.0 {
                return Err(Error::DomainViolation("singular matrix".into()));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    x.data.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                x.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    x.data[r * n + j] -= f * x.data[col * n + j];
                }
            }
        }
        for _ in 0..2 {
            // X <- X (2I - A X)
            let ax = self.matmul(&x);
            let mut two_i_minus = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let id = if i == j { 2.0 } else { 0.0 };
                    two_i_minus.set(i, j, id - ax.get(i, j));
                }
            }
            x = x.matmul(&two_i_minus);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiIndex;

    #[test]
    fn submatrix_repeats_rows_and_columns() {
        let b = SymMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 5.0],
            vec![3.0, 5.0, 6.0],
        ])
        .unwrap();

        let s = b.submatrix(&MultiIndex::new(vec![2, 0, 0])).unwrap();
        assert_eq!(s.rows(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);

        let s = b.submatrix(&MultiIndex::new(vec![1, 1, 0])).unwrap();
        assert_eq!(s.rows(), vec![vec![1.0, 2.0], vec![2.0, 4.0]]);

        let s = b.submatrix(&MultiIndex::new(vec![0, 0, 0])).unwrap();
        assert_eq!(s.dim(), 0);

        assert!(b.submatrix(&MultiIndex::new(vec![1, 0])).is_err());
    }

    #[test]
    fn construction_symmetrizes() {
        let b = SymMatrix::from_rows(&[vec![1.0, 0.4], vec![0.2, 1.0]]).unwrap();
        assert_eq!(b.get(0, 1), b.get(1, 0));
        assert!((b.get(0, 1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn cholesky_reconstructs() {
        let b = SymMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let l = b.cholesky().unwrap();
        let n = 2;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += l[i * n + k] * l[j * n + k];
                }
                assert!((s - b.get(i, j)).abs() < 1e-12);
            }
        }
        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(bad.cholesky().is_err());
    }

    #[test]
    fn det_and_inverse() {
        let m = Matrix {
            n: 3,
            data: vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0],
        };
        // det = 2*(6-1) - 1*(2-0) = 8
        assert!((m.det() - 8.0).abs() < 1e-12);
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        assert!(prod.sub(&Matrix::identity(3)).max_abs() < 1e-13);
    }
}
