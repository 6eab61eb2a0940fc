//! Minimal dense/sparse row-major storage and the handful of vector kernels
//! the row-action solvers need.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Compressed sparse row matrix with sorted, duplicate-free column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from coordinate triplets; duplicates are summed, explicit zeros kept.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by_key(|a| (a.0, a.1));

        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            indices.push(j);
            values.push(v);
            indptr[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self { rows, cols, indptr, indices, values })
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (idx, val) = self.row(i);
            idx.iter().zip(val).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            d.set(i, j, v);
        }
        d
    }
}

/// System matrix in either storage; all solver access goes through row kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(m: CsrMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.rows,
            Matrix::Sparse(s) => s.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.cols,
            Matrix::Sparse(s) => s.cols,
        }
    }

    /// `<a_i, x>`
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        match self {
            Matrix::Dense(d) => dot(d.row(i), x),
            Matrix::Sparse(s) => {
                let (idx, val) = s.row(i);
                idx.iter().zip(val).map(|(&j, v)| v * x[j]).sum()
            }
        }
    }

    /// `sum_j |a_ij x_j|`
    pub fn row_abs_dot(&self, i: usize, x: &[f64]) -> f64 {
        match self {
            Matrix::Dense(d) => d.row(i).iter().zip(x).map(|(a, v)| (a * v).abs()).sum(),
            Matrix::Sparse(s) => {
                let (idx, val) = s.row(i);
                idx.iter().zip(val).map(|(&j, v)| (v * x[j]).abs()).sum()
            }
        }
    }

    /// `y += alpha * a_i`
    #[inline]
    pub fn row_axpy(&self, i: usize, alpha: f64, y: &mut [f64]) {
        match self {
            Matrix::Dense(d) => axpy(alpha, d.row(i), y),
            Matrix::Sparse(s) => {
                let (idx, val) = s.row(i);
                for (&j, v) in idx.iter().zip(val) {
                    y[j] += alpha * v;
                }
            }
        }
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        match self {
            Matrix::Dense(d) => norm_sq(d.row(i)),
            Matrix::Sparse(s) => norm_sq(s.row(i).1),
        }
    }

    pub fn row_norms_sq(&self) -> Vec<f64> {
        (0..self.rows()).map(|i| self.row_norm_sq(i)).collect()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.row_norms_sq().iter().sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols(),
                x.len()
            )));
        }
        Ok((0..self.rows()).map(|i| self.row_dot(i, x)).collect())
    }

    /// `A^T y`
    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, vector has length {}",
                self.rows(),
                y.len()
            )));
        }
        let mut out = vec![0.0; self.cols()];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                self.row_axpy(i, yi, &mut out);
            }
        }
        Ok(out)
    }

    /// Indices of rows whose entries are all zero.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows()).filter(|&i| self.row_norm_sq(i) == 0.0).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(d) => d.clone(),
            Matrix::Sparse(s) => s.to_dense(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_sums_duplicates_and_sorts() {
        let m = CsrMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 1, 2.0), (1, 2, 3.0), (1, 0, -1.0)])
            .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.row(1), (&[0usize, 2][..], &[-1.0, 4.0][..]));
        assert_eq!(m.to_dense().row(0), &[0.0, 2.0, 0.0]);
    }

    #[test]
    fn out_of_range_triplet_rejected() {
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn dense_and_sparse_row_kernels_agree() {
        let d = DenseMatrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 0.0, 0.0]]).unwrap();
        let s = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0)]).unwrap();
        let (d, s) = (Matrix::from(d), Matrix::from(s));
        let x = [3.0, -1.0, 0.5];
        assert_eq!(d.row_dot(0, &x), s.row_dot(0, &x));
        assert_eq!(d.matvec_transpose(&[2.0, 1.0]).unwrap(), s.matvec_transpose(&[2.0, 1.0]).unwrap());
        assert_eq!(d.zero_rows(), vec![1]);
        assert_eq!(s.zero_rows(), vec![1]);
        assert_eq!(d.frobenius_sq(), 5.0);
    }

    #[test]
    fn matvec_checks_dimensions() {
        let m = Matrix::from(DenseMatrix::identity(2));
        assert!(matches!(m.matvec(&[1.0]), Err(Error::DimensionMismatch(_))));
    }
}
