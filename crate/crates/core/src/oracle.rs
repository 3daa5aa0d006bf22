//! Exact reference spectral norms at desk scale.
//!
//! Materializes `AᵀA` and diagonalizes it with cyclic Jacobi rotations.
//! `O(d³)` per sweep, so dimensions are capped (default 512).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_MAX_DIM: usize = 512;
pub const MAX_SWEEPS: usize = 100;
/// Convergence target for the off-diagonal Frobenius norm, relative to `‖G‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Dense symmetric `dim x dim` matrix, full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Symmetrizes `data` as `(M + Mᵀ)/2`.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DataLength {
                len: data.len(),
                rows: dim,
                cols: dim,
            });
        }
        let mut out = SymmetricMatrix { dim, data };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = 0.5 * (out.data[i * dim + j] + out.data[j * dim + i]);
                out.data[i * dim + j] = v;
                out.data[j * dim + i] = v;
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `self - other`.
    pub fn sub(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(SymmetricMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// All eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<SpectrumResult> {
        jacobi_eigenvalues(self.clone())
    }

    /// Spectral norm `max |λ_i|`, valid for indefinite matrices too.
    pub fn spectral_norm(&self) -> Result<f64> {
        let spec = self.eigenvalues()?;
        Ok(spec.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
    }
}

/// Eigenvalues of a symmetric matrix with convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub sweeps_used: usize,
    pub off_diag_norm: f64,
}

impl SpectrumResult {
    pub fn largest(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += a[i * n + j] * a[i * n + j];
        }
    }
    libm::sqrt(2.0 * acc)
}

fn jacobi_eigenvalues(m: SymmetricMatrix) -> Result<SpectrumResult> {
    let n = m.dim;
    let mut a = m.data;
    let target = OFF_DIAGONAL_TOL * libm::sqrt(a.iter().map(|v| v * v).sum());
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a, n);
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                off_diag_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let g = a[k * n + p];
                    let h = a[k * n + q];
                    let kp = c * g - s * h;
                    let kq = s * g + c * h;
                    a[k * n + p] = kp;
                    a[p * n + k] = kp;
                    a[k * n + q] = kq;
                    a[q * n + k] = kq;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a, n);
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    Ok(SpectrumResult {
        eigenvalues,
        sweeps_used: sweeps,
        off_diag_norm: off,
    })
}

/// Reference eigensolver with a configurable dimension cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub max_dim: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

impl Oracle {
    pub fn new(max_dim: usize) -> Self {
        Oracle { max_dim }
    }

    /// `AᵀA`, exactly symmetric.
    pub fn gram_matrix(&self, m: &Matrix) -> Result<SymmetricMatrix> {
        let d = m.n_cols();
        if d > self.max_dim {
            return Err(Error::OracleTooLarge {
                dim: d,
                cap: self.max_dim,
            });
        }
        let mut g = vec![0.0; d * d];
        let mut row = Vec::with_capacity(d);
        for i in 0..m.n_rows() {
            row.clear();
            m.for_each_in_row(i, |j, v| {
                if v != 0.0 {
                    row.push((j, v));
                }
            });
            for (a, &(j, vj)) in row.iter().enumerate() {
                for &(k, vk) in &row[a..] {
                    g[j * d + k] += vj * vk;
                }
            }
        }
        // upper triangle was accumulated for j <= k (rows are column-sorted)
        for j in 0..d {
            for k in (j + 1)..d {
                g[k * d + j] = g[j * d + k];
            }
        }
        Ok(SymmetricMatrix { dim: d, data: g })
    }

    /// Eigenvalues of `AᵀA` (the squared singular values, padded with zeros).
    pub fn spectrum(&self, m: &Matrix) -> Result<SpectrumResult> {
        self.gram_matrix(m)?.eigenvalues()
    }

    /// `‖A‖²`, the largest eigenvalue of `AᵀA`.
    pub fn exact_norm_sq(&self, m: &Matrix) -> Result<f64> {
        Ok(self.spectrum(m)?.largest())
    }
}

/// [`Oracle::gram_matrix`] with the default cap.
pub fn gram_matrix(m: &Matrix) -> Result<SymmetricMatrix> {
    Oracle::default().gram_matrix(m)
}

/// [`Oracle::exact_norm_sq`] with the default cap.
pub fn exact_norm_sq(m: &Matrix) -> Result<f64> {
    Oracle::default().exact_norm_sq(m)
}
