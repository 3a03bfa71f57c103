//! Active-set semismooth Newton method on the Fischer–Burmeister reformulation.
//!
//! Each iteration splits the components by the size of `D_b`: components with
//! `d_b ≤ ε` get a closed-form step from the diagonal part of `H`, the rest
//! solve a reduced system `(D_a/D_b + ∇F)_II d_I = rhs` that stays symmetric
//! whenever `∇F` is. The step is globalized by an Armijo search on
//! `Ψ = ½‖Φ‖²` with a steepest-descent fallback.

use std::time::Instant;

use crate::error::{check_len, Result};
use crate::linalg::{dot, norm2, LinearSolveStats, LinearSolver, SparseMatrix};
use crate::model::{IndexPartition, IterationRecord, MCProblem, Solution, SolverConfig, SolverReport, Status};
use crate::reformulation::{
    active_epsilon, merit, merit_gradient, partition_by_db, residual_phi, subdiff_diagonals, DiagonalPair,
};

/// Lower bound applied to `d_a` before inverting it on active components.
pub const ACTIVE_DA_FLOOR: f64 = 1e-10;

/// Everything the direction and line-search steps need at `x^k`.
#[derive(Debug, Clone)]
pub struct SemismoothState {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: f64,
    pub diag: DiagonalPair,
    pub partition: IndexPartition,
    pub direction: Vec<f64>,
    pub grad_psi: Vec<f64>,
    pub k: usize,
}

impl SemismoothState {
    /// Evaluates Φ, Ψ, the diagonals, the partition and ∇Ψ at `x`.
    pub fn at(
        problem: &MCProblem,
        x: Vec<f64>,
        f: Vec<f64>,
        j: &SparseMatrix,
        epsilon_override: Option<f64>,
        k: usize,
    ) -> Result<Self> {
        let phi = residual_phi(problem, &x, &f)?;
        let psi = merit(&phi);
        let diag = subdiff_diagonals(problem, &x, &f);
        let rule = active_epsilon(&phi, j, epsilon_override);
        let partition = partition_by_db(&diag, rule);
        let grad_psi = merit_gradient(j, &diag, &phi)?;
        let n = x.len();
        Ok(Self {
            x,
            f,
            phi,
            psi,
            diag,
            partition,
            direction: vec![0.0; n],
            grad_psi,
            k,
        })
    }
}

/// `diag(d_a/d_b)_II + J_II`, the matrix of the reduced Newton system.
pub fn reduced_matrix(state: &SemismoothState, j: &SparseMatrix) -> Result<SparseMatrix> {
    let inactive = &state.partition.inactive;
    let shift: Vec<f64> = inactive
        .iter()
        .map(|&i| state.diag.d_a[i] / state.diag.d_b[i])
        .collect();
    j.extract_submatrix(inactive, inactive)?.add_diagonal(&shift)
}

/// Newton direction: closed form on the active set, reduced solve on the rest.
pub fn semismooth_direction(
    state: &SemismoothState,
    j: &SparseMatrix,
    linear: &LinearSolver,
    inner_rtol: f64,
) -> Result<(Vec<f64>, LinearSolveStats)> {
    let n = state.x.len();
    check_len(n, j.n_rows())?;
    let DiagonalPair { d_a, d_b } = &state.diag;
    let mut d = vec![0.0; n];
    for &i in &state.partition.active {
        d[i] = -state.phi[i] / d_a[i].max(ACTIVE_DA_FLOOR);
    }
    let inactive = &state.partition.inactive;
    if inactive.is_empty() {
        return Ok((d, LinearSolveStats::default()));
    }
    // J·d with only the active block filled gives the J_IA d_A coupling term
    let coupling = j.spmv(&d)?;
    let rhs: Vec<f64> = inactive.iter().map(|&i| -state.phi[i] / d_b[i] - coupling[i]).collect();
    let reduced = reduced_matrix(state, j)?;
    let (d_inactive, stats) = linear.solve(&reduced, &rhs, inner_rtol)?;
    for (&i, v) in inactive.iter().zip(d_inactive) {
        d[i] = v;
    }
    Ok((d, stats))
}

/// ∇Ψᵀd ≤ −ρ‖d‖₂^p.
pub fn descent_test(grad_psi: &[f64], d: &[f64], rho: f64, p_exp: f64) -> bool {
    dot(grad_psi, d) <= -rho * norm2(d).powf(p_exp)
}

/// An accepted Armijo step.
#[derive(Debug, Clone)]
pub struct ArmijoStep {
    pub backtracks: usize,
    pub alpha: f64,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: f64,
}

/// Smallest `i ≤ max_backtracks` with `Ψ(x + βⁱd) ≤ Ψ(x) + σβⁱ∇Ψᵀd`.
///
/// Trial points with non-finite `F` count as rejections. When `Ψ(x) > 0`
/// the accepted merit must also be strictly below `Ψ(x)`, so rounding can
/// never turn a zero-progress step into an acceptance. Returns `None` when
/// every backtrack fails.
pub fn armijo_search(
    problem: &MCProblem,
    state: &SemismoothState,
    d: &[f64],
    beta: f64,
    sigma: f64,
    max_backtracks: usize,
) -> Option<ArmijoStep> {
    let slope = dot(&state.grad_psi, d);
    let mut alpha = 1.0;
    for i in 0..=max_backtracks {
        let x: Vec<f64> = state.x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        let f = problem.eval_f(&x);
        if let Ok(phi) = residual_phi(problem, &x, &f) {
            let psi = merit(&phi);
            let sufficient = psi <= state.psi + sigma * alpha * slope;
            let strict = state.psi == 0.0 || psi < state.psi;
            if sufficient && strict {
                return Some(ArmijoStep {
                    backtracks: i,
                    alpha,
                    x,
                    f,
                    phi,
                    psi,
                });
            }
        }
        alpha *= beta;
    }
    None
}

/// Runs the active-set semismooth method from `x0` (feasibility not required).
pub fn solve_semismooth(
    problem: &MCProblem,
    x0: &[f64],
    config: &SolverConfig,
    linear: &LinearSolver,
) -> Result<Solution> {
    solve_semismooth_observed(problem, x0, config, linear, &mut |_| {})
}

/// As [`solve_semismooth`], calling `observe` on the starting point and on every accepted iterate.
pub fn solve_semismooth_observed(
    problem: &MCProblem,
    x0: &[f64],
    config: &SolverConfig,
    linear: &LinearSolver,
    observe: &mut dyn FnMut(&[f64]),
) -> Result<Solution> {
    config.validate()?;
    check_len(problem.dim(), x0.len())?;
    let clock = Instant::now();
    let mut report = SolverReport::new();
    let mut x = x0.to_vec();
    let mut f = problem.eval_f(&x);

    let finish = |mut report: SolverReport, status: Status, x: Vec<f64>| {
        report.status = status;
        report.outer_iterations = report.history.len();
        report.wall_time_seconds = clock.elapsed().as_secs_f64();
        Ok(Solution { x, report })
    };

    if f.len() != x.len() || x.iter().chain(&f).any(|v| !v.is_finite()) {
        return finish(report, Status::InvalidInput, x);
    }

    let mut phi = residual_phi(problem, &x, &f)?;
    observe(&x);
    report.initial_residual = norm2(&phi);
    report.final_residual = report.initial_residual;
    let mut k = 0;
    loop {
        let residual = norm2(&phi);
        report.final_residual = residual;
        if residual <= config.tol {
            return finish(report, Status::Converged, x);
        }
        if report.linear_solves >= config.max_linear_solves {
            return finish(report, Status::LinearSolveBudgetExhausted, x);
        }
        let j = match problem.eval_jacobian(&x) {
            Ok(j) => j,
            Err(_) => return finish(report, Status::NumericalBreakdown, x),
        };
        let mut state = SemismoothState::at(problem, x.clone(), f.clone(), &j, config.epsilon_override, k)?;

        report.linear_solves += 1;
        let (mut d, stats) = semismooth_direction(&state, &j, linear, config.inner_rtol)?;
        report.inner_iterations_total += stats.iterations;

        let usable = d.iter().all(|v| v.is_finite());
        let fallback = !usable || !descent_test(&state.grad_psi, &d, config.rho, config.p_exp);
        if fallback {
            d = state.grad_psi.iter().map(|g| -g).collect();
        }
        if !(dot(&state.grad_psi, &d) < 0.0) {
            // ∇Ψ = 0 away from a solution: stationary point of the merit function
            return finish(report, Status::StationaryOrFailed, x);
        }
        state.direction = d;

        let step = match armijo_search(
            problem,
            &state,
            &state.direction,
            config.beta,
            config.sigma,
            config.max_backtracks,
        ) {
            Some(step) => step,
            None => return finish(report, Status::LineSearchFailure, x),
        };
        report.history.push(IterationRecord {
            iteration: k,
            residual_norm: norm2(&step.phi),
            step_size: step.alpha,
            active_count: state.partition.active.len(),
            gradient_fallback: fallback,
            inner_iterations: stats.iterations,
        });
        x = step.x;
        observe(&x);
        f = step.f;
        phi = step.phi;
        k += 1;
    }
}
