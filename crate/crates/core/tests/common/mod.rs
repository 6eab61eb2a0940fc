#![allow(dead_code)]

use bregman_kaczmarz::linalg::{dot, norm_sq};
use bregman_kaczmarz::{Matrix, Potential, SketchSample, SolverState};
use nalgebra::{DMatrix, DVector};

/// `S^T (A x - b)` and `A^T S S^T (A x - b)` for a sampled block.
pub fn sketched(a: &Matrix, b: &[f64], x: &[f64], sample: &SketchSample) -> (Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = sample.rows.clone().map(|i| a.row_dot(i, x) - b[i]).collect();
    let mut g = vec![0.0; a.cols()];
    for (i, ri) in sample.rows.clone().zip(&r) {
        a.row_axpy(i, *ri, &mut g);
    }
    (r, g)
}

/// Frobenius norm squared of the sampled rows.
pub fn rows_norm_sq(a: &Matrix, sample: &SketchSample) -> f64 {
    sample.rows.clone().map(|i| a.row_norm_sq(i)).sum()
}

/// `D(x, x_hat)` written out from the primal side: `phi(x_hat) - phi(x) - <x*, x_hat - x>`.
pub fn bregman_primal(p: &Potential, x_star: &[f64], x_hat: &[f64]) -> f64 {
    let x = p.primal_map(x_star);
    let diff: Vec<f64> = x_hat.iter().zip(&x).map(|(a, b)| a - b).collect();
    p.primal_value(x_hat) - p.primal_value(&x) - dot(x_star, &diff)
}

/// `<x*_k - x*_{k-1}, x_hat>` from the realized iterates.
pub fn realized_inner(prev_x_star: &[f64], state: &SolverState, x_hat: &[f64]) -> f64 {
    state.x_star.iter().zip(prev_x_star).zip(x_hat).map(|((a, b), c)| (a - b) * c).sum()
}

fn proj_coeff(x: &[f64], y: &[f64]) -> f64 {
    dot(x, y) / norm_sq(y)
}

fn minus_proj(x: &[f64], y: &[f64]) -> Vec<f64> {
    let c = proj_coeff(x, y);
    x.iter().zip(y).map(|(a, b)| a - c * b).collect()
}

/// `||(I - P_span{y,z}) x||^2` via a 2x2 normal-equation solve.
pub fn projection_residual_direct(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let (yy, zz, yz) = (norm_sq(y), norm_sq(z), dot(y, z));
    let (xy, xz) = (dot(x, y), dot(x, z));
    let det = yy * zz - yz * yz;
    let c1 = (xy * zz - xz * yz) / det;
    let c2 = (xz * yy - xy * yz) / det;
    x.iter().zip(y).zip(z).map(|((xi, yi), zi)| (xi - c1 * yi - c2 * zi).powi(2)).sum()
}

/// Right-hand side of the iterated-projection identity:
/// `||(I-P_z)(I-P_y)x||^2 - <(I-P_y)x, P_z y>^2 / ||(I-P_z)y||^2`.
pub fn projection_residual_iterated(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let u1 = minus_proj(x, y);
    let u2 = minus_proj(&u1, z);
    let c = proj_coeff(y, z);
    let pz_y: Vec<f64> = z.iter().map(|zi| c * zi).collect();
    let ortho_y = minus_proj(y, z);
    norm_sq(&u2) - dot(&u1, &pz_y).powi(2) / norm_sq(&ortho_y)
}

/// Distance from `v` to `range(A^T)` by an SVD least-squares solve of `A^T c = v`.
pub fn distance_to_row_space(a: &Matrix, v: &[f64]) -> f64 {
    let d = a.to_dense();
    let at = DMatrix::from_fn(a.cols(), a.rows(), |i, j| d.get(j, i));
    let rhs = DVector::from_column_slice(v);
    let svd = at.clone().svd(true, true);
    let c = svd.solve(&rhs, 1e-13).expect("svd solve");
    (at * c - rhs).norm()
}
