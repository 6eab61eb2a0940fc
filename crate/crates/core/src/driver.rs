//! Driver loop with residual checkpoints.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::problem::ProblemInstance;
use crate::sketch::SketchDistribution;
use crate::solver::{Solver, SolverConfig, SolverState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: u64,
    /// `||A x_k - b|| / ||b||`
    pub rel_residual: f64,
    /// `D(x_k, x_hat)` when the instance carries `x_hat`.
    pub bregman_to_xhat: Option<f64>,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: Vec<TraceRecord>,
    /// The relative residual dropped below `residual_tol` at some checkpoint.
    pub converged: bool,
    pub iterations: u64,
    pub state: SolverState,
}

impl RunOutcome {
    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::INFINITY, |r| r.rel_residual)
    }

    /// First checkpoint with relative residual below `tol`.
    pub fn first_below(&self, tol: f64) -> Option<&TraceRecord> {
        self.trace.iter().find(|r| r.rel_residual < tol)
    }
}

/// Runs `config.method` from `x*_0 = 0` until `max_iters` or until the relative
/// residual, evaluated every `checkpoint_every` steps, falls below `residual_tol`.
pub fn run(problem: &ProblemInstance, dist: &SketchDistribution, config: &SolverConfig) -> Result<RunOutcome> {
    let potential = problem.potential();
    let solver = Solver::new(&problem.a, &problem.b, potential, dist, config)?;
    let mut state = solver.initial_state();
    if let Some(x_hat) = &problem.x_hat {
        if x_hat.len() != problem.cols() {
            return Err(Error::DimensionMismatch(format!(
                "x_hat has length {}, A has {} columns",
                x_hat.len(),
                problem.cols()
            )));
        }
    }

    let b_norm = norm(&problem.b);
    let start = Instant::now();
    let record = |state: &SolverState| -> Result<TraceRecord> {
        let ax = problem.a.matvec(&state.x)?;
        let r: f64 = ax.iter().zip(&problem.b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let rel_residual = if b_norm > 0.0 { r / b_norm } else { r };
        let bregman_to_xhat = problem.x_hat.as_ref().map(|xh| potential.bregman_distance(&state.x_star, xh));
        let elapsed_seconds = if config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        Ok(TraceRecord { k: state.k, rel_residual, bregman_to_xhat, elapsed_seconds })
    };

    let mut trace = vec![record(&state)?];
    if b_norm == 0.0 {
        return Ok(RunOutcome { trace, converged: true, iterations: 0, state });
    }
    let mut converged = trace[0].rel_residual < config.residual_tol;
    while !converged && state.k < config.max_iters {
        solver.step(&mut state)?;
        if state.k % config.checkpoint_every == 0 || state.k == config.max_iters {
            let rec = record(&state)?;
            converged = rec.rel_residual < config.residual_tol;
            trace.push(rec);
        }
    }
    Ok(RunOutcome { trace, converged, iterations: state.k, state })
}
