//! Block sketches: more rows per step means fewer (but costlier) steps.

use bregman_kaczmarz::{generate_gaussian, run, Method, SketchDistribution, SolverConfig, StepRule};

fn main() {
    let p = generate_gaussian(120, 300, 6, 21).unwrap().with_lambda(1.0);
    for block in [1, 4, 12, 40] {
        let dist = SketchDistribution::frobenius_blocks(&p.a, block).unwrap();
        for rule in [StepRule::NonAdaptive, StepRule::Adaptive] {
            let mut cfg = SolverConfig::new(Method::Bk);
            cfg.step_rule = rule;
            cfg.checkpoint_every = 10;
            cfg.max_iters = 200_000;
            let out = run(&p, &dist, &cfg).unwrap();
            println!(
                "block {block:>2} {rule:?}: {:>6} steps ({:>7} rows touched), residual {:.2e}",
                out.iterations,
                out.iterations * block as u64,
                out.final_residual()
            );
        }
    }
}
