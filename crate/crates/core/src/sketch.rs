//! Sketching distributions over single rows or contiguous row blocks.
//!
//! A sketch `S` selects a set of rows of the system, so `S^T (Ax - b)` is the
//! residual restricted to those rows and `A^T S S^T (Ax - b)` is the sketched
//! gradient. Sampling is by inverse CDF over a precomputed prefix-sum array.

use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix};

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SketchMode {
    SingleRow,
    Block,
}

/// Discrete distribution over row sketches.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchDistribution {
    mode: SketchMode,
    weights: Vec<f64>,
    /// One range per weight. For `SingleRow` these are `i..i+1`.
    ranges: Vec<Range<usize>>,
    cumulative: Vec<f64>,
}

/// One draw from a [`SketchDistribution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchSample {
    pub index: usize,
    pub rows: Range<usize>,
}

/// `p_i = ||a_i||^2 / ||A||_F^2`; zero rows receive weight 0.
pub fn default_row_weights(a: &Matrix) -> Result<Vec<f64>> {
    let norms = a.row_norms_sq();
    let total: f64 = norms.iter().sum();
    if total == 0.0 {
        return Err(Error::AllRowsZero);
    }
    Ok(norms.into_iter().map(|v| v / total).collect())
}

fn block_norm_sq(a: &Matrix, rows: &Range<usize>) -> f64 {
    rows.clone().map(|i| a.row_norm_sq(i)).sum()
}

impl SketchDistribution {
    /// Single-row sketching with explicit weights (one per row).
    pub fn single_row(weights: Vec<f64>) -> Result<Self> {
        let ranges = (0..weights.len()).map(|i| i..i + 1).collect();
        Self::build(SketchMode::SingleRow, weights, ranges)
    }

    /// Single-row sketching with `p_i = ||a_i||^2 / ||A||_F^2`.
    pub fn squared_row_norms(a: &Matrix) -> Result<Self> {
        let d = Self::single_row(default_row_weights(a)?)?;
        d.validate(a)?;
        Ok(d)
    }

    /// Single-row sketching, uniform over the nonzero rows.
    pub fn uniform_rows(a: &Matrix) -> Result<Self> {
        let nonzero: Vec<bool> = (0..a.rows()).map(|i| a.row_norm_sq(i) > 0.0).collect();
        let count = nonzero.iter().filter(|&&z| z).count();
        if count == 0 {
            return Err(Error::AllRowsZero);
        }
        let w = nonzero.iter().map(|&z| if z { 1.0 / count as f64 } else { 0.0 }).collect();
        Self::single_row(w)
    }

    /// Block sketching over explicit contiguous ranges that partition `0..m`.
    pub fn blocks(ranges: Vec<Range<usize>>, weights: Vec<f64>) -> Result<Self> {
        if ranges.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} ranges but {} weights",
                ranges.len(),
                weights.len()
            )));
        }
        let mut next = 0;
        for r in &ranges {
            if r.start != next || r.end <= r.start {
                return Err(Error::InvalidDistribution(format!(
                    "block ranges must be nonempty, contiguous and start at 0; got {r:?} after row {next}"
                )));
            }
            next = r.end;
        }
        Self::build(SketchMode::Block, weights, ranges)
    }

    /// Splits the rows into consecutive blocks of `block_size` rows (the last
    /// block may be shorter) weighted by `||A_(i)||_F^2 / ||A||_F^2`.
    pub fn frobenius_blocks(a: &Matrix, block_size: usize) -> Result<Self> {
        let ranges = Self::partition(a.rows(), block_size)?;
        let total = a.frobenius_sq();
        if total == 0.0 {
            return Err(Error::AllRowsZero);
        }
        let w = ranges.iter().map(|r| block_norm_sq(a, r) / total).collect();
        let d = Self::blocks(ranges, w)?;
        d.validate(a)?;
        Ok(d)
    }

    /// Consecutive blocks of `block_size` rows, uniform over the nonzero blocks.
    pub fn uniform_blocks(a: &Matrix, block_size: usize) -> Result<Self> {
        let ranges = Self::partition(a.rows(), block_size)?;
        let nonzero: Vec<bool> = ranges.iter().map(|r| block_norm_sq(a, r) > 0.0).collect();
        let count = nonzero.iter().filter(|&&z| z).count();
        if count == 0 {
            return Err(Error::AllRowsZero);
        }
        let w = nonzero.iter().map(|&z| if z { 1.0 / count as f64 } else { 0.0 }).collect();
        Self::blocks(ranges, w)
    }

    fn partition(m: usize, block_size: usize) -> Result<Vec<Range<usize>>> {
        if block_size == 0 || m == 0 {
            return Err(Error::InvalidDistribution("block size and row count must be positive".into()));
        }
        Ok((0..m).step_by(block_size).map(|s| s..(s + block_size).min(m)).collect())
    }

    fn build(mode: SketchMode, weights: Vec<f64>, ranges: Vec<Range<usize>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no sketches".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidDistribution("weights must be finite and nonnegative".into()));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        if (acc - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {acc}, not 1")));
        }
        Ok(Self { mode, weights, ranges, cumulative })
    }

    /// Checks the distribution against a matrix: ranges cover exactly its rows
    /// and every positively weighted sketch selects a nonzero block.
    pub fn validate(&self, a: &Matrix) -> Result<()> {
        let covered = self.ranges.last().map_or(0, |r| r.end);
        if covered != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "sketches cover {covered} rows, matrix has {}",
                a.rows()
            )));
        }
        for (index, (w, r)) in self.weights.iter().zip(&self.ranges).enumerate() {
            if *w > 0.0 && block_norm_sq(a, r) == 0.0 {
                return Err(Error::ZeroSketchedMatrix { index });
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> SketchMode {
        self.mode
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of rows covered.
    pub fn rows(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }

    /// Draws sketch `i` with probability `weights[i]`, consuming exactly one
    /// uniform variate from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SketchSample {
        let total = *self.cumulative.last().expect("nonempty distribution");
        let u: f64 = rng.random::<f64>() * total;
        let mut index = self.cumulative.partition_point(|&c| c <= u);
        if index >= self.weights.len() {
            // u rounded onto the total; fall back to the last positive weight
            index = self.weights.iter().rposition(|&w| w > 0.0).expect("some weight is positive");
        }
        SketchSample { index, rows: self.ranges[index].clone() }
    }
}

fn check_sample(a: &Matrix, s: &SketchSample) -> Result<()> {
    if s.rows.is_empty() || s.rows.end > a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "sample rows {:?} invalid for a matrix with {} rows",
            s.rows,
            a.rows()
        )));
    }
    Ok(())
}

/// `S^T (Ax - b)`: the residual restricted to the sampled rows.
pub fn sketched_residual(a: &Matrix, b: &[f64], x: &[f64], s: &SketchSample) -> Result<Vec<f64>> {
    check_sample(a, s)?;
    if b.len() != a.rows() || x.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, b has {}, x has {}",
            a.rows(),
            a.cols(),
            b.len(),
            x.len()
        )));
    }
    Ok(s.rows.clone().map(|i| a.row_dot(i, x) - b[i]).collect())
}

/// `A^T S S^T (Ax - b)` given the sketched residual `S^T (Ax - b)`.
pub fn sketched_gradient(a: &Matrix, residual_s: &[f64], s: &SketchSample) -> Result<Vec<f64>> {
    check_sample(a, s)?;
    if residual_s.len() != s.rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "sketched residual has length {}, sample selects {} rows",
            residual_s.len(),
            s.rows.len()
        )));
    }
    let mut g = vec![0.0; a.cols()];
    for (i, &r) in s.rows.clone().zip(residual_s) {
        if r != 0.0 {
            a.row_axpy(i, r, &mut g);
        }
    }
    Ok(g)
}

/// `||A^T S||^2`: squared Frobenius norm of the sampled rows.
pub fn sketch_norm_sq(a: &Matrix, s: &SketchSample) -> f64 {
    block_norm_sq(a, &s.rows)
}

/// Symmetric matrix as produced by [`matrix_m`] or supplied by a caller.
#[derive(Debug, Clone, PartialEq)]
pub enum SymmetricMatrix {
    Diagonal(Vec<f64>),
    Dense(DenseMatrix),
}

impl SymmetricMatrix {
    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            SymmetricMatrix::Diagonal(d) => {
                let mut m = DenseMatrix::zeros(d.len(), d.len());
                for (i, &v) in d.iter().enumerate() {
                    m.set(i, i, v);
                }
                m
            }
            SymmetricMatrix::Dense(m) => m.clone(),
        }
    }
}

/// `M = E[S S^T / ||A^T S||^2]`.
///
/// For row and block sketches `S S^T` is the 0/1 diagonal selector of the
/// sampled rows, so `M` is diagonal with entry `p_j / ||A_(j)||_F^2` on every
/// row of block `j`.
pub fn matrix_m(a: &Matrix, dist: &SketchDistribution) -> Result<SymmetricMatrix> {
    if dist.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "distribution covers {} rows, matrix has {}",
            dist.rows(),
            a.rows()
        )));
    }
    let mut diag = vec![0.0; a.rows()];
    for (index, (w, r)) in dist.weights.iter().zip(&dist.ranges).enumerate() {
        if *w == 0.0 {
            continue;
        }
        let norm = block_norm_sq(a, r);
        if norm == 0.0 {
            return Err(Error::ZeroSketchedMatrix { index });
        }
        for i in r.clone() {
            diag[i] += w / norm;
        }
    }
    Ok(SymmetricMatrix::Diagonal(diag))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min(m: &SymmetricMatrix) -> f64 {
    match m {
        SymmetricMatrix::Diagonal(d) => d.iter().copied().fold(f64::INFINITY, f64::min),
        SymmetricMatrix::Dense(d) => {
            let n = d.data().len().isqrt();
            let mat = nalgebra::DMatrix::from_row_slice(n, n, d.data());
            let eig = nalgebra::SymmetricEigen::new(mat);
            eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
        }
    }
}
