//! Small dense symmetric matrices (covariances of dimension ≤ a handful).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(invalid("empty matrix"));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(invalid("matrix is not square"));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol * (1.0 + self.get(i, j).abs()))
        })
    }

    /// `tᵀ M t`.
    pub fn quad_form(&self, t: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in 0..self.n {
                row += self.get(i, j) * t[j];
            }
            acc += t[i] * row;
        }
        acc
    }

    /// Semi-definiteness test by a Cholesky sweep that tolerates zero pivots.
    pub fn is_positive_semidefinite(&self) -> bool {
        let n = self.n;
        let scale = (0..n).map(|i| self.get(i, i).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let tol = 1e-12 * scale;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d < -tol {
                return false;
            }
            if d <= tol {
                // zero pivot: the rest of the column must vanish too
                for i in j + 1..n {
                    let mut v = self.get(i, j);
                    for k in 0..j {
                        v -= l[i * n + k] * l[j * n + k];
                    }
                    if v.abs() > 1e-9 * scale {
                        return false;
                    }
                }
                continue;
            }
            let d = libm::sqrt(d);
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / d;
            }
        }
        true
    }

    /// Lower Cholesky factor of a positive definite matrix.
    pub fn cholesky(&self) -> Result<Matrix> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return Err(invalid("matrix is not positive definite"));
            }
            let d = libm::sqrt(d);
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / d;
            }
        }
        Ok(Matrix { n, data: l })
    }
}

/// Precomputed pieces of a Gaussian density `N(mean, cov)`.
#[derive(Debug, Clone)]
pub(crate) struct GaussianDensity {
    chol: Matrix,
    log_norm: f64,
}

impl GaussianDensity {
    pub(crate) fn new(cov: &Matrix) -> Result<Self> {
        let chol = cov.cholesky()?;
        let n = cov.dim();
        let log_det: f64 = (0..n).map(|i| 2.0 * libm::log(chol.get(i, i))).sum();
        let log_norm = -0.5 * (n as f64 * libm::log(2.0 * core::f64::consts::PI) + log_det);
        Ok(Self { chol, log_norm })
    }

    pub(crate) fn eval(&self, mean: &[f64], y: &[f64]) -> f64 {
        // solve L z = y - mean
        let n = self.chol.dim();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut v = y[i] - mean[i];
            for k in 0..i {
                v -= self.chol.get(i, k) * z[k];
            }
            z[i] = v / self.chol.get(i, i);
        }
        let q: f64 = z.iter().map(|v| v * v).sum();
        libm::exp(self.log_norm - 0.5 * q)
    }
}
