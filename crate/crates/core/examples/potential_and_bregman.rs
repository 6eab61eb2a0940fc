//! The l1 + l2 potential: soft shrinkage as the primal map, and the Bregman
//! distance computed from the dual variable.

use bregman_kaczmarz::{soft_shrink, Potential};

fn main() {
    let x_star = [2.5, -0.4, 0.9, -3.0];
    for lambda in [0.0, 1.0] {
        let phi = Potential::for_lambda(lambda);
        let x = phi.primal_map(&x_star);
        assert_eq!(x, soft_shrink(&x_star, lambda));
        println!("lambda = {lambda}: x* = {x_star:?} -> x = {x:?}");

        let y = [1.0, 0.0, 0.0, -2.0];
        let d = phi.bregman_distance(&x_star, &y);
        // primal form: phi(y) - phi(x) - <x*, y - x>
        let lin: f64 = x_star.iter().zip(y.iter().zip(&x)).map(|(s, (yi, xi))| s * (yi - xi)).sum();
        let primal = phi.primal_value(&y) - phi.primal_value(&x) - lin;
        println!("  D(x, y) = {d:.6} (primal form {primal:.6})");
    }
}
