//! Sparse linear algebra: CSR storage, PCG, preconditioners and a direct LU path.

mod cg;
mod dense;
mod precond;
mod sparse;

use serde::{Deserialize, Serialize};

pub use cg::{cg_solve, LinearSolveStats};
pub use dense::{dense_lu_solve, BandLu, DEFAULT_DENSE_CAP, SINGULAR_PIVOT_RTOL};
pub use precond::{block_ranges, Ilu0, Preconditioner, PreconditionerKind, DEFAULT_BLOCK_COUNT, ILU_PIVOT_FLOOR};
pub use sparse::SparseMatrix;

pub(crate) use cg::{dot, norm2};

use crate::error::{Error, Result};

/// Which linear solver the Newton methods use for their reduced systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    /// Preconditioned CG; `max_iter = None` means the system dimension.
    Cg {
        preconditioner: PreconditionerKind,
        max_iter: Option<usize>,
    },
    /// Partial-pivoted LU, refused above `cap` unknowns.
    Lu { cap: usize },
}

impl LinearSolver {
    pub fn cg(preconditioner: PreconditionerKind) -> Self {
        Self::Cg {
            preconditioner,
            max_iter: None,
        }
    }

    pub fn lu() -> Self {
        Self::Lu { cap: DEFAULT_DENSE_CAP }
    }

    /// Solves `A x = b`. CG runs to relative residual `rtol`; LU solves exactly.
    ///
    /// Failures that a caller can recover from (singular LU, preconditioner
    /// setup, non-finite output) are folded into `breakdown_flag` with a zero
    /// vector, so the solvers can fall back without an error path.
    pub fn solve(&self, a: &SparseMatrix, b: &[f64], rtol: f64) -> Result<(Vec<f64>, LinearSolveStats)> {
        crate::error::check_len(a.n_rows(), b.len())?;
        let n = b.len();
        let broken = || {
            (
                vec![0.0; n],
                LinearSolveStats {
                    iterations: 0,
                    achieved_relative_residual: 1.0,
                    breakdown_flag: true,
                },
            )
        };
        match *self {
            LinearSolver::Cg {
                preconditioner,
                max_iter,
            } => {
                let m = match Preconditioner::build(preconditioner, a) {
                    Ok(m) => m,
                    Err(Error::ZeroDiagonal(_)) | Err(Error::NonFinite(_)) => return Ok(broken()),
                    Err(e) => return Err(e),
                };
                let max_iter = max_iter.unwrap_or(n.max(10));
                cg_solve(a, b, &m, rtol, max_iter)
            }
            LinearSolver::Lu { cap } => {
                if n == 0 {
                    return Ok((Vec::new(), LinearSolveStats::default()));
                }
                match BandLu::factor_with_cap(a, cap).and_then(|lu| lu.solve(b)) {
                    Ok(x) => {
                        let r = a.spmv(&x)?;
                        let res: f64 = norm2(&r.iter().zip(b).map(|(u, v)| u - v).collect::<Vec<_>>());
                        let bn = norm2(b);
                        let rel = if bn > 0.0 { res / bn } else { res };
                        Ok((
                            x,
                            LinearSolveStats {
                                iterations: 1,
                                achieved_relative_residual: rel,
                                breakdown_flag: false,
                            },
                        ))
                    }
                    Err(Error::Singular { .. }) | Err(Error::NonFinite(_)) => Ok(broken()),
                    Err(e) => Err(e),
                }
            }
        }
    }
}
