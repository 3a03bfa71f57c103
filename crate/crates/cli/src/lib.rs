//! Benchmark harness: builds a problem from a [`RunSpec`], runs a solver and
//! produces machine-readable reports.

pub mod report;
pub mod spec;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use compsolve::problems::small_suite;
use compsolve::{complementarity_error, LinearSolver, Method, SolverConfig, Status};
use thiserror::Error;

pub use report::{
    write_solution_csv, MethodSummary, PairwiseDifference, ReportDocument, RobustnessEntry, RobustnessReport,
    Table2Report, Table2Row, TOOL_VERSION,
};
pub use spec::{parse_choices, Ksp, OutputFormat, Pc, ProblemKind, RunSpec, SolverChoice};

/// Success criterion for the robustness summary.
pub const ROBUSTNESS_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid run specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Solver(#[from] compsolve::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use compsolve::Error as E;
        match self {
            CliError::Spec(_) => 4,
            CliError::Solver(
                E::InvalidInput(_)
                | E::InvalidBounds { .. }
                | E::InvalidConfig(_)
                | E::DimensionMismatch { .. }
                | E::TooLarge { .. },
            ) => 4,
            CliError::Solver(_) => 5,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

/// 0 converged, 2 budget, 3 line search or stationary, 4 invalid input, 5 breakdown.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => 0,
        Status::LinearSolveBudgetExhausted => 2,
        Status::LineSearchFailure | Status::StationaryOrFailed => 3,
        Status::InvalidInput => 4,
        Status::NumericalBreakdown | Status::LinearSolverBreakdown => 5,
    }
}

/// A report together with the final iterate.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub document: ReportDocument,
    pub x: Vec<f64>,
}

fn final_error(problem: &compsolve::MCProblem, x: &[f64]) -> f64 {
    complementarity_error(problem, x).unwrap_or(f64::NAN)
}

/// Builds, solves and writes any requested dumps.
pub fn run_single(spec: &RunSpec) -> Result<RunOutcome, CliError> {
    let built = spec.build()?;
    let solution = spec
        .method
        .solve(&built.problem, &built.x0, &spec.solver_config(), &spec.linear_solver())?;
    if let Some(path) = &spec.dump_solution {
        write_solution_csv(BufWriter::new(File::create(path)?), built.grid.as_ref(), &solution.x)?;
    }
    if let Some(path) = &spec.dump_matrix {
        dump_matrix(&built.problem, &solution.x, path)?;
    }
    let document = ReportDocument {
        tool_version: TOOL_VERSION.into(),
        spec: spec.clone(),
        problem_name: built.problem.name().into(),
        dimension: built.problem.dim(),
        complementarity_error: final_error(&built.problem, &solution.x),
        report: solution.report,
    };
    Ok(RunOutcome {
        document,
        x: solution.x,
    })
}

/// Jacobian at `x` in MatrixMarket coordinate format.
fn dump_matrix(problem: &compsolve::MCProblem, x: &[f64], path: &Path) -> Result<(), CliError> {
    let j = problem.eval_jacobian(x)?;
    j.write_matrix_market(BufWriter::new(File::create(path)?))?;
    Ok(())
}

/// The default comparison rows: direct LU, CG with ILU(0), CG with block Jacobi.
pub const TABLE2_DEFAULT: [SolverChoice; 3] = [
    SolverChoice::LU,
    SolverChoice::cg(Pc::Ilu0),
    SolverChoice::cg(Pc::Bjacobi),
];

/// Solves `base`'s problem once per configuration, sequentially, and reports
/// the per-row counts and the pairwise ∞-norm solution differences.
pub fn run_table2(base: &RunSpec, choices: &[SolverChoice]) -> Result<Table2Report, CliError> {
    if choices.is_empty() {
        return Err(CliError::Spec("no solver configurations given".into()));
    }
    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    let mut header = None;
    for &choice in choices {
        let spec = RunSpec {
            ksp: choice.ksp,
            pc: choice.pc,
            dump_solution: None,
            dump_matrix: None,
            ..base.clone()
        };
        let out = run_single(&spec)?;
        let d = &out.document;
        header.get_or_insert((d.problem_name.clone(), d.dimension));
        rows.push(Table2Row {
            solver: choice.to_string(),
            status: d.report.status,
            wall_time_seconds: d.report.wall_time_seconds,
            outer_iterations: d.report.outer_iterations,
            linear_solves: d.report.linear_solves,
            inner_iterations_total: d.report.inner_iterations_total,
            final_residual: d.report.final_residual,
            complementarity_error: d.complementarity_error,
        });
        solutions.push(out.x);
    }
    let mut pairwise = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let diff = solutions[a]
                .iter()
                .zip(&solutions[b])
                .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            pairwise.push(PairwiseDifference {
                a: rows[a].solver.clone(),
                b: rows[b].solver.clone(),
                max_abs_difference: diff,
            });
        }
    }
    let (problem_name, dimension) = header.expect("at least one row");
    Ok(Table2Report {
        tool_version: TOOL_VERSION.into(),
        problem_name,
        dimension,
        method: base.method,
        rows,
        pairwise,
    })
}

/// Runs both methods on every bundled suite instance with `linear`.
pub fn run_robustness(
    config: &SolverConfig,
    choice: SolverChoice,
    blocks: usize,
) -> Result<RobustnessReport, CliError> {
    config.validate()?;
    let linear: LinearSolver = choice.linear_solver(blocks);
    let suite = small_suite()?;
    let mut entries = Vec::new();
    let mut summary = Vec::new();
    for method in [Method::Assm, Method::Rsls] {
        let mut failures = Vec::new();
        for inst in &suite {
            let (status, err) = match method.solve(&inst.problem, &inst.x0, config, &linear) {
                Ok(s) => (s.report.status, final_error(&inst.problem, &s.x)),
                Err(_) => (Status::NumericalBreakdown, f64::NAN),
            };
            let solved = status.is_converged() && err <= ROBUSTNESS_TOL;
            if !solved {
                failures.push(inst.name().to_owned());
            }
            entries.push(RobustnessEntry {
                instance: inst.name().to_owned(),
                category: inst.category,
                method,
                status,
                complementarity_error: err,
                solved,
            });
        }
        let total = suite.len();
        let solved = total - failures.len();
        summary.push(MethodSummary {
            method,
            solved,
            total,
            fraction: solved as f64 / total as f64,
            failures,
        });
    }
    Ok(RobustnessReport {
        tool_version: TOOL_VERSION.into(),
        solver: choice.to_string(),
        entries,
        summary,
    })
}
