//! Recover a sparse vector from an underdetermined Gaussian system with each
//! method, at a small and a large `lambda`.

use bregman_kaczmarz::solver::D_TOL_GAUSSIAN;
use bregman_kaczmarz::{generate_gaussian, run, Method, SketchDistribution, SolverConfig};

fn main() {
    let base = generate_gaussian(100, 250, 8, 11).unwrap();
    let x_hat = base.x_hat.clone().unwrap();
    for lambda in [0.1, 5.0] {
        let p = base.clone().with_lambda(lambda);
        let dist = SketchDistribution::squared_row_norms(&p.a).unwrap();
        println!("lambda = {lambda}");
        for method in Method::ALL {
            let mut cfg = SolverConfig::new(method);
            cfg.d_tol = D_TOL_GAUSSIAN;
            cfg.checkpoint_every = 100;
            cfg.max_iters = 200_000;
            let out = run(&p, &dist, &cfg).unwrap();
            let x = &out.state.x;
            let err = x.iter().zip(&x_hat).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let support = x.iter().filter(|v| v.abs() > 1e-6).count();
            println!(
                "  {:<6} iters {:>6}  residual {:.2e}  ||x - x_hat|| {err:.2e}  nonzeros {support}",
                method.name(),
                out.iterations,
                out.final_residual()
            );
        }
    }
}
