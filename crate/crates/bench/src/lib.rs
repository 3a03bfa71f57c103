//! Fixtures shared by the criterion benchmarks in `benches/`.

use compsolve::problems::{journal_bearing, BearingParams};
use compsolve::{MCProblem, SparseMatrix};

/// Journal bearing on an `n × n` grid with eccentricity 0.9 and its projected zero start.
pub fn bearing(n: usize) -> (MCProblem, Vec<f64>) {
    let params = BearingParams::new(0.9, 10.0).expect("valid bearing parameters");
    let grid = params.grid(n, n).expect("valid grid");
    let problem = journal_bearing(&grid, &params).expect("valid problem");
    let x0 = problem.project(&vec![0.0; problem.dim()]);
    (problem, x0)
}

/// The bearing Jacobian (SPD five-point matrix) and a smooth right-hand side.
pub fn bearing_system(n: usize) -> (SparseMatrix, Vec<f64>) {
    let (problem, x0) = bearing(n);
    let a = problem.eval_jacobian(&x0).expect("finite Jacobian");
    let b = (0..a.n_rows()).map(|k| ((k % 17) as f64 - 8.0) / 8.0).collect();
    (a, b)
}
