//! Active-set Newton solvers for mixed complementarity problems.
//!
//! Two methods share one problem model and one sparse linear-algebra layer:
//!
//! * [`ssls`]: a semismooth Newton method on the Fischer–Burmeister
//!   reformulation that solves a reduced, symmetric system on the inactive
//!   components and globalizes with an Armijo search on `½‖Φ‖²`.
//! * [`rsls`]: a feasible reduced-space Newton method with a projected line
//!   search on the projected residual `‖F_Ω‖`.
//!
//! The linear solver behind both is chosen at run time
//! ([`linalg::LinearSolver`]): preconditioned CG with identity, Jacobi,
//! ILU(0) or block-Jacobi/ILU(0) preconditioning, or a direct LU.
//! [`problems`] supplies discretized obstacle-type benchmarks, random LCPs
//! with an enumeration oracle, and a small certified robustness suite.

// `!(x > 0.0)` deliberately rejects NaN; index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod reformulation;
pub mod rsls;
pub mod ssls;

pub use error::{Error, Result};
pub use linalg::{LinearSolveStats, LinearSolver, Preconditioner, PreconditionerKind, SparseMatrix};
pub use model::{
    complementarity_error, jacobian_fd_error, validate_start_point, IndexPartition, IterationRecord, MCProblem,
    Solution, SolverConfig, SolverReport, Status,
};
pub use rsls::{solve_reduced_space, solve_reduced_space_observed};
pub use ssls::{solve_semismooth, solve_semismooth_observed};

use serde::{Deserialize, Serialize};

/// The two solution methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Active-set semismooth method.
    Assm,
    /// Active-set reduced-space method.
    Rsls,
}

impl Method {
    pub fn solve(
        self,
        problem: &MCProblem,
        x0: &[f64],
        config: &SolverConfig,
        linear: &LinearSolver,
    ) -> Result<Solution> {
        match self {
            Method::Assm => solve_semismooth(problem, x0, config, linear),
            Method::Rsls => solve_reduced_space(problem, x0, config, linear),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Assm => "assm",
            Method::Rsls => "rsls",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assm" => Ok(Method::Assm),
            "rsls" => Ok(Method::Rsls),
            other => Err(Error::InvalidInput(format!(
                "unknown method {other:?} (expected assm or rsls)"
            ))),
        }
    }
}
