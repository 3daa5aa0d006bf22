//! Dense and row-compressed sparse matrices.
//!
//! Only the handful of primitives the estimators need are provided: products
//! with `A` and `Aᵀ`, the Gram operator `x ↦ Aᵀ(Ax)`, and row norms. Values
//! are immutable once a [`Matrix`] is built.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major, `n_rows * n_cols` values.
    Dense(Vec<f64>),
    Sparse(Csr),
}

#[derive(Debug, Clone, PartialEq)]
struct Csr {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// A real `n_rows x n_cols` matrix, stored densely or in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    storage: Storage,
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        Err(Error::EmptyShape { rows, cols })
    } else {
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Matrix {
    /// Builds a dense matrix from row-major `data`.
    pub fn from_dense(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        if data.len() != n_rows * n_cols {
            return Err(Error::DataLength {
                len: data.len(),
                rows: n_rows,
                cols: n_cols,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_cols,
                col: pos % n_cols,
            });
        }
        Ok(Matrix {
            n_rows,
            n_cols,
            storage: Storage::Dense(data),
        })
    }

    /// Builds a dense matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_dense(n_rows, n_cols, data)
    }

    /// Builds a sparse matrix from coordinate entries.
    ///
    /// Duplicate `(row, col)` pairs are summed; entries that are (or sum to)
    /// exactly zero are dropped.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        check_shape(n_rows, n_cols)?;
        let mut entries: Vec<(usize, usize, f64)> = entries.into_iter().collect();
        for &(row, col, v) in &entries {
            if row >= n_rows || col >= n_cols {
                return Err(Error::IndexOutOfBounds {
                    row,
                    col,
                    rows: n_rows,
                    cols: n_cols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut rows_of = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 != r || c2 != c {
                    break;
                }
                v += v2;
                iter.next();
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
            if v != 0.0 {
                rows_of.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        for &r in &rows_of {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Matrix {
            n_rows,
            n_cols,
            storage: Storage::Sparse(Csr {
                row_ptr,
                col_idx,
                values,
            }),
        })
    }

    /// The `d x d` identity, stored sparse.
    pub fn identity(d: usize) -> Result<Self> {
        Self::from_triplets(d, d, (0..d).map(|i| (i, i, 1.0)))
    }

    /// A square diagonal matrix, stored sparse.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::from_triplets(d, d, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::from_dense(n_rows, n_cols, vec![0.0; n_rows * n_cols])
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(data) => data.iter().filter(|v| **v != 0.0).count(),
            Storage::Sparse(csr) => csr.values.len(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.n_rows && col < self.n_cols, "index out of bounds");
        match &self.storage {
            Storage::Dense(data) => data[row * self.n_cols + col],
            Storage::Sparse(csr) => {
                let lo = csr.row_ptr[row];
                let hi = csr.row_ptr[row + 1];
                match csr.col_idx[lo..hi].binary_search(&col) {
                    Ok(k) => csr.values[lo + k],
                    Err(_) => 0.0,
                }
            }
        }
    }

    /// Calls `f(col, value)` for the stored entries of row `i`, in column order.
    ///
    /// Dense rows report every entry, including zeros.
    pub fn for_each_in_row<F: FnMut(usize, f64)>(&self, i: usize, mut f: F) {
        match &self.storage {
            Storage::Dense(data) => {
                let row = &data[i * self.n_cols..(i + 1) * self.n_cols];
                for (j, &v) in row.iter().enumerate() {
                    f(j, v);
                }
            }
            Storage::Sparse(csr) => {
                let span = csr.row_ptr[i]..csr.row_ptr[i + 1];
                for (&j, &v) in csr.col_idx[span.clone()].iter().zip(&csr.values[span]) {
                    f(j, v);
                }
            }
        }
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            self.for_each_in_row(i, |j, v| {
                if v != 0.0 {
                    out.push((i, j, v));
                }
            });
        }
        out
    }

    /// Row-major copy of every entry.
    pub fn to_row_major(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(data) => data.clone(),
            Storage::Sparse(_) => {
                let mut data = vec![0.0; self.n_rows * self.n_cols];
                for i in 0..self.n_rows {
                    self.for_each_in_row(i, |j, v| data[i * self.n_cols + j] = v);
                }
                data
            }
        }
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            storage: Storage::Dense(self.to_row_major()),
        }
    }

    pub fn to_sparse(&self) -> Matrix {
        match &self.storage {
            Storage::Sparse(_) => self.clone(),
            Storage::Dense(_) => Self::from_triplets(self.n_rows, self.n_cols, self.triplets())
                .expect("entries of a valid matrix are in bounds"),
        }
    }

    /// `Aᵀ`, keeping the storage kind.
    pub fn transpose(&self) -> Matrix {
        let (rows, cols) = (self.n_cols, self.n_rows);
        match &self.storage {
            Storage::Dense(data) => {
                let mut out = vec![0.0; data.len()];
                for i in 0..self.n_rows {
                    for j in 0..self.n_cols {
                        out[j * cols + i] = data[i * self.n_cols + j];
                    }
                }
                Matrix {
                    n_rows: rows,
                    n_cols: cols,
                    storage: Storage::Dense(out),
                }
            }
            Storage::Sparse(_) => Self::from_triplets(
                rows,
                cols,
                self.triplets().into_iter().map(|(i, j, v)| (j, i, v)),
            )
            .expect("transposed entries are in bounds"),
        }
    }

    /// Returns `Aᵀ` when `A` has more columns than rows, otherwise `A` itself.
    ///
    /// The spectral norm is unchanged either way, and the result always has
    /// `n_rows >= n_cols`.
    pub fn transpose_if_wide(self) -> Matrix {
        if self.n_cols > self.n_rows {
            self.transpose()
        } else {
            self
        }
    }

    /// `c * A`, keeping the storage kind.
    pub fn scaled(&self, c: f64) -> Matrix {
        let storage = match &self.storage {
            Storage::Dense(data) => Storage::Dense(data.iter().map(|v| c * v).collect()),
            Storage::Sparse(csr) => Storage::Sparse(Csr {
                row_ptr: csr.row_ptr.clone(),
                col_idx: csr.col_idx.clone(),
                values: csr.values.iter().map(|v| c * v).collect(),
            }),
        };
        Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            storage,
        }
    }

    fn check_len(&self, expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        match &self.storage {
            Storage::Dense(data) => dot(&data[i * self.n_cols..(i + 1) * self.n_cols], x),
            Storage::Sparse(csr) => {
                let span = csr.row_ptr[i]..csr.row_ptr[i + 1];
                csr.col_idx[span.clone()]
                    .iter()
                    .zip(&csr.values[span])
                    .map(|(&j, &v)| v * x[j])
                    .sum()
            }
        }
    }

    #[inline]
    fn add_scaled_row(&self, i: usize, s: f64, out: &mut [f64]) {
        match &self.storage {
            Storage::Dense(data) => {
                let row = &data[i * self.n_cols..(i + 1) * self.n_cols];
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += s * v;
                }
            }
            Storage::Sparse(csr) => {
                let span = csr.row_ptr[i]..csr.row_ptr[i + 1];
                for (&j, &v) in csr.col_idx[span.clone()].iter().zip(&csr.values[span]) {
                    out[j] += s * v;
                }
            }
        }
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(self.n_cols, x.len())?;
        Ok((0..self.n_rows).map(|i| self.row_dot(i, x)).collect())
    }

    /// `Aᵀ y`.
    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(self.n_rows, y.len())?;
        let mut out = vec![0.0; self.n_cols];
        for (i, &s) in y.iter().enumerate() {
            if s != 0.0 {
                self.add_scaled_row(i, s, &mut out);
            }
        }
        Ok(out)
    }

    /// `Aᵀ(A x)` without forming `AᵀA`: one pass over the rows, accumulating
    /// `(a_i · x) a_i`. Costs `O(nnz)`.
    pub fn gram_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_cols];
        self.gram_apply_into(x, &mut out)?;
        Ok(out)
    }

    /// As [`Matrix::gram_apply`], writing into `out` (overwritten).
    pub fn gram_apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(self.n_cols, x.len())?;
        self.check_len(self.n_cols, out.len())?;
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.n_rows {
            let s = self.row_dot(i, x);
            if s != 0.0 {
                self.add_scaled_row(i, s, out);
            }
        }
        Ok(())
    }

    /// `‖a_i‖²` for each row.
    pub fn row_norms_squared(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| {
                let mut acc = 0.0;
                self.for_each_in_row(i, |_, v| acc += v * v);
                acc
            })
            .collect()
    }

    /// `‖A‖_F² = Σ_ij A_ij²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.row_norms_squared().iter().sum()
    }
}
