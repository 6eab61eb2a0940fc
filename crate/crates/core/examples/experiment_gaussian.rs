//! Gaussian benchmark: all four methods on repeated 200x500 instances.
//!
//! ```text
//! cargo run --release --example experiment_gaussian -- [lambda] [repeats] [max_iters]
//! ```

use bregman_kaczmarz::bench::{run_bench, threads_from_env, BenchSpec, InstanceSource};
use bregman_kaczmarz::solver::D_TOL_GAUSSIAN;
use bregman_kaczmarz::{Method, SolverConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let lambda: f64 = args.first().map_or(5.0, |s| s.parse().expect("lambda"));
    let repeats: u64 = args.get(1).map_or(10, |s| s.parse().expect("repeats"));
    let max_iters: u64 = args.get(2).map_or(100_000, |s| s.parse().expect("max_iters"));

    let mut config = SolverConfig::new(Method::Bk);
    config.d_tol = D_TOL_GAUSSIAN;
    config.max_iters = max_iters;
    config.checkpoint_every = 200;
    let spec = BenchSpec {
        source: InstanceSource::Gaussian { m: 200, n: 500, nnz: 10 },
        lambda,
        methods: Method::ALL.to_vec(),
        repeats,
        base_seed: 1,
        config,
    };
    let report = run_bench(&spec, threads_from_env()).expect("bench");

    println!("lambda = {lambda}, {repeats} trials, target 1e-6");
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "method", "iters_med", "time_med", "final_med", "reached");
    for r in &report.methods {
        let show = |v: Option<f64>| v.map_or("*".to_string(), |x| format!("{x:.4}"));
        println!(
            "{:>6} {:>10} {:>10} {:>10.2e} {:>5}/{}",
            r.method.name(),
            show(r.iterations.median),
            show(r.time.median),
            r.quantiles.last().unwrap().median,
            r.iterations.reached,
            r.iterations.trials
        );
    }
}
