//! Active-set reduced-space method with a projected line search.
//!
//! Iterates stay inside the bounds. Components sitting at a bound with `F`
//! pushing outward are frozen; the rest take a Newton step on
//! `[∇F]_II d_I = −F_I`. Steps are accepted on a contraction of the projected
//! residual `‖F_Ω‖₂`, with `d = −F` as the fallback direction.

use std::time::Instant;

use crate::error::{check_len, Result};
use crate::linalg::{norm2, LinearSolveStats, LinearSolver, SparseMatrix};
use crate::model::{
    validate_start_point, IndexPartition, IterationRecord, MCProblem, Solution, SolverConfig, SolverReport, Status,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackStage {
    Newton,
    GradientFallback,
}

#[derive(Debug, Clone)]
pub struct ReducedSpaceState {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub fomega: Vec<f64>,
    pub partition: IndexPartition,
    pub direction: Vec<f64>,
    pub fallback_stage: FallbackStage,
    pub k: usize,
}

impl ReducedSpaceState {
    pub fn at(problem: &MCProblem, x: Vec<f64>, f: Vec<f64>, k: usize) -> Self {
        let fomega = projected_residual(problem, &x, &f);
        let partition = partition_reduced(problem, &x, &f);
        let n = x.len();
        Self {
            x,
            f,
            fomega,
            partition,
            direction: vec![0.0; n],
            fallback_stage: FallbackStage::Newton,
            k,
        }
    }

    pub fn fomega_norm(&self) -> f64 {
        norm2(&self.fomega)
    }
}

/// F_Ω: `F` in the interior, `min(F, 0)` at a lower bound, `max(F, 0)` at an upper bound.
pub fn projected_residual(problem: &MCProblem, x: &[f64], f: &[f64]) -> Vec<f64> {
    let (lo, up) = (problem.lower(), problem.upper());
    (0..x.len())
        .map(|i| {
            if x[i] == lo[i] {
                f[i].min(0.0)
            } else if x[i] == up[i] {
                f[i].max(0.0)
            } else {
                f[i]
            }
        })
        .collect()
}

/// Active = at a bound with `F` strictly pointing out of the box.
pub fn partition_reduced(problem: &MCProblem, x: &[f64], f: &[f64]) -> IndexPartition {
    let (lo, up) = (problem.lower(), problem.upper());
    IndexPartition::from_predicate(x.len(), |i| {
        (x[i] == lo[i] && f[i] > 0.0) || (x[i] == up[i] && f[i] < 0.0)
    })
}

/// `d_A = 0`, `[∇F]_II d_I = −F_I`.
pub fn reduced_direction(
    state: &ReducedSpaceState,
    j: &SparseMatrix,
    linear: &LinearSolver,
    inner_rtol: f64,
) -> Result<(Vec<f64>, LinearSolveStats)> {
    let n = state.x.len();
    check_len(n, j.n_rows())?;
    let mut d = vec![0.0; n];
    let inactive = &state.partition.inactive;
    if inactive.is_empty() {
        return Ok((d, LinearSolveStats::default()));
    }
    let reduced = j.extract_submatrix(inactive, inactive)?;
    let rhs: Vec<f64> = inactive.iter().map(|&i| -state.f[i]).collect();
    let (d_inactive, stats) = linear.solve(&reduced, &rhs, inner_rtol)?;
    for (&i, v) in inactive.iter().zip(d_inactive) {
        d[i] = v;
    }
    Ok((d, stats))
}

#[derive(Debug, Clone)]
pub struct ProjectedStep {
    pub backtracks: usize,
    pub alpha: f64,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub fomega_norm: f64,
}

/// Tries `α = βʲ` for `j = 0, 1, …` while `βʲ > γ`, accepting the first
/// `‖F_Ω(π[x + αd])‖ ≤ (1 − σα)‖F_Ω(x)‖`. `None` means no admissible step.
pub fn projected_search(
    problem: &MCProblem,
    state: &ReducedSpaceState,
    d: &[f64],
    beta: f64,
    sigma: f64,
    gamma: f64,
) -> Option<ProjectedStep> {
    let current = state.fomega_norm();
    let mut j = 0usize;
    loop {
        let alpha = beta.powi(j as i32);
        if !(alpha > gamma) {
            return None;
        }
        let trial: Vec<f64> = state.x.iter().zip(d).map(|(x, di)| x + alpha * di).collect();
        let x = problem.project(&trial);
        let f = problem.eval_f(&x);
        if f.iter().all(|v| v.is_finite()) {
            let norm = norm2(&projected_residual(problem, &x, &f));
            if norm <= (1.0 - sigma * alpha) * current && norm < current {
                return Some(ProjectedStep {
                    backtracks: j,
                    alpha,
                    x,
                    f,
                    fomega_norm: norm,
                });
            }
        }
        j += 1;
    }
}

/// Runs the reduced-space method from the projection of `x0` onto the bounds.
pub fn solve_reduced_space(
    problem: &MCProblem,
    x0: &[f64],
    config: &SolverConfig,
    linear: &LinearSolver,
) -> Result<Solution> {
    solve_reduced_space_observed(problem, x0, config, linear, &mut |_| {})
}

/// As [`solve_reduced_space`], calling `observe` on the starting point and on every accepted iterate.
pub fn solve_reduced_space_observed(
    problem: &MCProblem,
    x0: &[f64],
    config: &SolverConfig,
    linear: &LinearSolver,
    observe: &mut dyn FnMut(&[f64]),
) -> Result<Solution> {
    config.validate()?;
    let clock = Instant::now();
    let mut report = SolverReport::new();
    let x = validate_start_point(problem, x0)?;
    let f = problem.eval_f(&x);

    let finish = |mut report: SolverReport, status: Status, x: Vec<f64>| {
        report.status = status;
        report.outer_iterations = report.history.len();
        report.wall_time_seconds = clock.elapsed().as_secs_f64();
        Ok(Solution { x, report })
    };

    if f.len() != x.len() || f.iter().any(|v| !v.is_finite()) {
        return finish(report, Status::InvalidInput, x);
    }
    let mut state = ReducedSpaceState::at(problem, x, f, 0);
    observe(&state.x);
    report.initial_residual = state.fomega_norm();
    loop {
        let residual = state.fomega_norm();
        report.final_residual = residual;
        if residual <= config.tol {
            return finish(report, Status::Converged, state.x);
        }
        if report.linear_solves >= config.max_linear_solves {
            return finish(report, Status::LinearSolveBudgetExhausted, state.x);
        }
        let j = match problem.eval_jacobian(&state.x) {
            Ok(j) => j,
            Err(_) => return finish(report, Status::NumericalBreakdown, state.x),
        };
        report.linear_solves += 1;
        let (d, stats) = reduced_direction(&state, &j, linear, config.inner_rtol)?;
        report.inner_iterations_total += stats.iterations;

        let newton_ok = !stats.breakdown_flag && d.iter().all(|v| v.is_finite());
        state.direction = d;
        state.fallback_stage = FallbackStage::Newton;
        let mut step = if newton_ok {
            projected_search(
                problem,
                &state,
                &state.direction,
                config.beta,
                config.sigma,
                config.gamma,
            )
        } else {
            None
        };
        if step.is_none() {
            state.fallback_stage = FallbackStage::GradientFallback;
            state.direction = state.f.iter().map(|v| -v).collect();
            step = projected_search(
                problem,
                &state,
                &state.direction,
                config.beta,
                config.sigma,
                config.gamma,
            );
        }
        let Some(step) = step else {
            return finish(report, Status::StationaryOrFailed, state.x);
        };
        report.history.push(IterationRecord {
            iteration: state.k,
            residual_norm: step.fomega_norm,
            step_size: step.alpha,
            active_count: state.partition.active.len(),
            gradient_fallback: state.fallback_stage == FallbackStage::GradientFallback,
            inner_iterations: stats.iterations,
        });
        state = ReducedSpaceState::at(problem, step.x, step.f, state.k + 1);
        observe(&state.x);
    }
}
