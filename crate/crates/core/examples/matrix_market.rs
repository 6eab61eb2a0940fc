//! Write a sparse matrix to Matrix Market, read it back and solve a planted
//! system with it.

use bregman_kaczmarz::{
    plant_solution, read_matrix_market, run, write_matrix_market, CsrMatrix, Matrix, Method, ProblemInstance,
    SketchDistribution, SolverConfig,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() {
    // 60 x 90, eight random entries per row
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut t = Vec::new();
    for i in 0..60 {
        for j in sample(&mut rng, 90, 8) {
            t.push((i, j, rng.sample::<f64, _>(StandardNormal)));
        }
    }
    let a: Matrix = CsrMatrix::from_triplets(60, 90, &t).unwrap().into();

    let dir = std::env::temp_dir().join("bk_matrix_market_example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sparse.mtx");
    write_matrix_market(&path, &a).unwrap();
    let back = read_matrix_market(&path).unwrap();
    println!("wrote and read {} ({} x {})", path.display(), back.rows(), back.cols());

    let (x_hat, b) = plant_solution(&back, 0.1, 3).unwrap();
    let p = ProblemInstance::new(back, b, Some(x_hat), 0.1).unwrap();
    let dist = SketchDistribution::squared_row_norms(&p.a).unwrap();
    let mut cfg = SolverConfig::new(Method::BkRem);
    cfg.checkpoint_every = 60;
    cfg.max_iters = 500_000;
    let out = run(&p, &dist, &cfg).unwrap();
    println!("BK-REM: converged {} after {} steps, residual {:.2e}", out.converged, out.iterations, out.final_residual());
}
