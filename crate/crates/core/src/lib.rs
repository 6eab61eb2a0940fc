//! Randomized Bregman-Kaczmarz solvers for consistent linear systems `Ax = b`,
//! targeting the minimizer of a strongly convex potential (sparse solutions
//! with `lambda ||x||_1 + 0.5 ||x||^2`).
//!
//! Four methods share one state machine: plain sketched Bregman-Kaczmarz
//! (BK), an exact-step variant (ESRK), and BK with exact (BK-EM) or relaxed
//! (BK-REM) minimal-error momentum.
//!
//! ```
//! use bregman_kaczmarz::{generate_gaussian, run, Method, SketchDistribution, SolverConfig};
//!
//! let problem = generate_gaussian(40, 80, 4, 7).unwrap().with_lambda(1.0);
//! let dist = SketchDistribution::squared_row_norms(&problem.a).unwrap();
//! let mut config = SolverConfig::new(Method::BkRem);
//! config.checkpoint_every = 40;
//! let outcome = run(&problem, &dist, &config).unwrap();
//! assert!(outcome.converged);
//! ```

pub mod bench;
pub mod cli;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod linesearch;
pub mod mtx;
pub mod potential;
pub mod problem;
pub mod sketch;
pub mod solver;

pub use driver::{run, RunOutcome, TraceRecord};
pub use error::{Error, Result};
pub use linalg::{CsrMatrix, DenseMatrix, Matrix};
pub use linesearch::{solve_bisection, solve_exact_l1, solve_quadratic, LineProblem};
pub use mtx::{read_matrix_market, write_matrix_market};
pub use potential::{soft_shrink, Potential, PotentialKind};
pub use problem::{generate_gaussian, plant_solution, ProblemInstance};
pub use sketch::{lambda_min, matrix_m, SketchDistribution, SketchMode, SketchSample, SymmetricMatrix};
pub use solver::{Method, Solver, SolverConfig, SolverState, StepReport, StepRule};
