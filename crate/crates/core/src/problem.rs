//! Consistent test problems `Ax = b` with a planted solution.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{norm, DenseMatrix, Matrix};
use crate::potential::Potential;

/// ChaCha stream reserved for instance construction; solver sampling uses stream 0.
const INSTANCE_STREAM: u64 = 1;

pub(crate) fn instance_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INSTANCE_STREAM);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub x_hat: Option<Vec<f64>>,
    pub lambda: f64,
}

impl ProblemInstance {
    pub fn new(a: Matrix, b: Vec<f64>, x_hat: Option<Vec<f64>>, lambda: f64) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!("A has {} rows, b has {}", a.rows(), b.len())));
        }
        if let Some(x) = &x_hat {
            if x.len() != a.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "A has {} columns, x_hat has {}",
                    a.cols(),
                    x.len()
                )));
            }
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(Self { a, b, x_hat, lambda })
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn potential(&self) -> Potential {
        Potential::for_lambda(self.lambda)
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// `||A x_hat - b||`, if a planted solution is known.
    pub fn consistency_error(&self) -> Option<f64> {
        let x = self.x_hat.as_ref()?;
        let ax = self.a.matvec(x).ok()?;
        Some(ax.iter().zip(&self.b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
    }

    /// `||Ax - b|| / ||b||`; 0 when `b = 0` and `Ax = 0`.
    pub fn relative_residual(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.matvec(x)?;
        let r: f64 = ax.iter().zip(&self.b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let nb = norm(&self.b);
        Ok(if nb == 0.0 {
            if r == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            r / nb
        })
    }

    /// Rows of `A` that are identically zero; sketch weights must exclude them.
    pub fn zero_rows(&self) -> Vec<usize> {
        self.a.zero_rows()
    }
}

fn sparse_normal_vector(n: usize, nnz: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; n];
    let mut positions = sample_indices(rng, n, nnz).into_vec();
    positions.sort_unstable();
    for p in positions {
        x[p] = StandardNormal.sample(rng);
    }
    x
}

/// Dense standard-normal `A` (m x n), `x_hat` with `nnz_xhat` standard-normal
/// entries at distinct uniformly random positions, and `b = A x_hat`.
pub fn generate_gaussian(m: usize, n: usize, nnz_xhat: usize, seed: u64) -> Result<ProblemInstance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDims(format!("m and n must be positive, got {m}x{n}")));
    }
    if nnz_xhat == 0 || nnz_xhat > n {
        return Err(Error::InvalidDims(format!("nnz must lie in 1..={n}, got {nnz_xhat}")));
    }
    let mut rng = instance_rng(seed);
    let data: Vec<f64> = (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let a: Matrix = DenseMatrix::new(m, n, data)?.into();
    let x_hat = sparse_normal_vector(n, nnz_xhat, &mut rng);
    let b = a.matvec(&x_hat)?;
    ProblemInstance::new(a, b, Some(x_hat), 0.0)
}

/// `x_hat` with `round(density * n)` (at least one) standard-normal entries and `b = A x_hat`.
pub fn plant_solution(a: &Matrix, density: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidConfig(format!("density must lie in (0, 1], got {density}")));
    }
    let n = a.cols();
    let nnz = ((density * n as f64).round() as usize).clamp(1, n);
    let mut rng = instance_rng(seed);
    let x_hat = sparse_normal_vector(n, nnz, &mut rng);
    let b = a.matvec(&x_hat)?;
    Ok((x_hat, b))
}
