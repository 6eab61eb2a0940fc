//! Exact minimization of `g(t) = phi*(u + t v) - t s` along a line.
//!
//! The piecewise-quadratic solver is exact for the l1 + l2 potential; bisection
//! works for any potential and should agree to its tolerance.

use bregman_kaczmarz::{solve_bisection, solve_exact_l1, solve_quadratic, LineProblem, Potential};

fn main() {
    let u = [0.8, -1.7, 0.2, 2.4, -0.1];
    let v = [1.0, 0.5, -2.0, 0.3, 1.2];
    let s = 0.7;

    let quad = LineProblem::new(&u, &v, s, Potential::squared_norm()).unwrap();
    let t = solve_exact_l1(&quad).unwrap();
    println!("lambda = 0: exact {t:.12}, closed form {:.12}", solve_quadratic(&u, &v, s).unwrap());

    for lambda in [0.5, 1.0, 3.0] {
        let lp = LineProblem::new(&u, &v, s, Potential::for_lambda(lambda)).unwrap();
        let exact = solve_exact_l1(&lp).unwrap();
        let bisect = solve_bisection(&lp, 1e-12).unwrap();
        println!(
            "lambda = {lambda}: exact {exact:.12}  bisection {bisect:.12}  g'(t) = {:+.2e}  breakpoints {}",
            lp.derivative(exact),
            lp.breakpoints().len()
        );
    }
}
