//! Two independent solve paths for [`LinearProgram`]s: a floating-point
//! revised simplex for production, and an exact rational simplex with
//! Bland's rule used as the golden-value oracle.

mod exact;
mod lu;
mod simplex;

pub use exact::{solve_exact, ExactSolveResult, DEFAULT_NNZ_CAP};
pub use simplex::solve_with_options;

use crate::error::Result;
use crate::lp::LinearProgram;

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

/// Outcome of a floating-point solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    /// `objective · x + offset` under the program's sense.
    pub objective: f64,
    /// Values of the program's variables (fixings reinstated).
    pub primal: Vec<f64>,
    pub iterations: usize,
    /// Max violation over all rows of the original program.
    pub max_constraint_violation: f64,
    /// Max violation of the nonnegativity bounds.
    pub max_bound_violation: f64,
}

/// Solver knobs. `tol` is the shared feasibility/optimality tolerance;
/// `max_iter` caps simplex iterations.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Enable the implied-zero presolve (dominated-row reduction).
    pub presolve: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let tol = std::env::var("CBD_LP_TOL")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(1e-9);
        let max_iter = std::env::var("CBD_LP_MAX_ITER")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(200_000);
        SolverOptions {
            tol,
            max_iter,
            presolve: true,
        }
    }
}

/// Solve with the floating-point simplex at tolerance `tol`.
///
/// Deterministic for identical inputs: Dantzig pricing with lowest-index
/// tie-breaking, lowest-ratio/lowest-basic-index leaving rule, and a Bland
/// fallback after a run of degenerate pivots.
pub fn solve(lp: &LinearProgram, tol: f64) -> Result<SolveResult> {
    solve_with_options(
        lp,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}
