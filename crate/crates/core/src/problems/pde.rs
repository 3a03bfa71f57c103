//! Finite-difference obstacle-type variational inequalities on rectangles.
//!
//! Every instance has `F(v) = L v + s(v)` where `L` is the scaled five-point
//! operator from [`weighted_laplacian`], so `F` is the gradient of a discrete
//! energy and `∇F = L + diag(s'(v))` keeps the five-point pattern.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::model::MCProblem;
use crate::problems::grid::{weighted_laplacian, GridSpec};

/// Upper end of the accepted combustion parameter range.
pub const COMBUSTION_LAMBDA_MAX: f64 = 6.8;
pub const DEFAULT_TORSION_LOAD: f64 = 5.0;
pub const DEFAULT_COMBUSTION_LAMBDA: f64 = 5.0;
pub const DEFAULT_BEARING_HALF_HEIGHT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BearingParams {
    pub eccentricity: f64,
    pub half_height: f64,
}

impl BearingParams {
    pub fn new(eccentricity: f64, half_height: f64) -> Result<Self> {
        if !(eccentricity > 0.0 && eccentricity < 1.0) {
            return Err(Error::InvalidInput(format!(
                "eccentricity {eccentricity} must lie in (0, 1)"
            )));
        }
        if !(half_height > 0.0) || !half_height.is_finite() {
            return Err(Error::InvalidInput(format!(
                "half height {half_height} must be positive"
            )));
        }
        Ok(Self {
            eccentricity,
            half_height,
        })
    }

    /// Film-thickness coefficient `(1 + ε cos ξ₁)³`.
    pub fn w_q(&self, xi1: f64) -> f64 {
        (1.0 + self.eccentricity * xi1.cos()).powi(3)
    }

    /// Load `ε sin ξ₁`.
    pub fn w_l(&self, xi1: f64) -> f64 {
        self.eccentricity * xi1.sin()
    }

    /// The bearing domain `(0, 2π) × (0, 2b)` discretized with `nx × ny` interior nodes.
    pub fn grid(&self, nx: usize, ny: usize) -> Result<GridSpec> {
        GridSpec::new(nx, ny, 2.0 * PI, 2.0 * self.half_height)
    }
}

#[derive(Debug, Clone)]
enum Source {
    /// s(v) = load
    Constant(Vec<f64>),
    /// s(v) = −scale·exp(v)
    Exponential(f64),
}

#[derive(Debug)]
struct StencilOperator {
    laplacian: SparseMatrix,
    diag_pos: Vec<usize>,
    source: Source,
}

impl StencilOperator {
    fn new(laplacian: SparseMatrix, source: Source) -> Self {
        let diag_pos = laplacian
            .diagonal_positions()
            .into_iter()
            .map(|p| p.expect("five-point stencil stores its diagonal"))
            .collect();
        Self {
            laplacian,
            diag_pos,
            source,
        }
    }

    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; v.len()];
        if v.len() != self.laplacian.n_cols() {
            return vec![f64::NAN; self.laplacian.n_rows()];
        }
        self.laplacian.spmv_into(v, &mut f);
        match &self.source {
            Source::Constant(load) => f.iter_mut().zip(load).for_each(|(fi, b)| *fi += b),
            Source::Exponential(scale) => f.iter_mut().zip(v).for_each(|(fi, vi)| *fi -= scale * vi.exp()),
        }
        f
    }

    fn jacobian(&self, v: &[f64]) -> Result<SparseMatrix> {
        match &self.source {
            Source::Constant(_) => Ok(self.laplacian.clone()),
            Source::Exponential(scale) => {
                let mut values = self.laplacian.values().to_vec();
                for (&p, vi) in self.diag_pos.iter().zip(v) {
                    values[p] -= scale * vi.exp();
                }
                self.laplacian.with_values(values)
            }
        }
    }

    fn into_problem(self, name: String, lower: Vec<f64>, upper: Vec<f64>) -> Result<MCProblem> {
        let op = Arc::new(self);
        let jac = Arc::clone(&op);
        MCProblem::new(name, lower, upper, move |v| op.residual(v), move |v| jac.jacobian(v))
    }
}

/// Pressure in a lubricated journal bearing: `v ≥ 0` against the energy
/// `½∫w_q|∇v|² − ∫w_l v` on `(0, 2π) × (0, 2b)`.
pub fn journal_bearing(grid: &GridSpec, params: &BearingParams) -> Result<MCProblem> {
    let expected_x = 2.0 * PI;
    let expected_y = 2.0 * params.half_height;
    if (grid.extent_x - expected_x).abs() > 1e-12 * expected_x
        || (grid.extent_y - expected_y).abs() > 1e-12 * expected_y
    {
        return Err(Error::InvalidInput(
            "journal bearing grid must span (0, 2π) × (0, 2b)".into(),
        ));
    }
    let p = *params;
    let laplacian = weighted_laplacian(grid, |x1, _| p.w_q(x1));
    let area = grid.hx * grid.hy;
    let load = grid.nodes().map(|(_, _, x1, _)| -area * p.w_l(x1)).collect();
    let n = grid.n();
    StencilOperator::new(laplacian, Source::Constant(load)).into_problem(
        format!("jbearing_{}x{}_e{}", grid.nx, grid.ny, p.eccentricity),
        vec![0.0; n],
        vec![f64::INFINITY; n],
    )
}

/// Obstacle height `sin(3.2 ξ₁)·sin(3.3 ξ₂)`.
pub fn obstacle_height(xi1: f64, xi2: f64) -> f64 {
    (3.2 * xi1).sin() * (3.3 * xi2).sin()
}

/// Membrane over an obstacle on the unit square, no load.
pub fn obstacle(grid: &GridSpec) -> Result<MCProblem> {
    let laplacian = weighted_laplacian(grid, |_, _| 1.0);
    let n = grid.n();
    let lower = grid.nodes().map(|(_, _, x1, x2)| obstacle_height(x1, x2)).collect();
    StencilOperator::new(laplacian, Source::Constant(vec![0.0; n])).into_problem(
        format!("obstacle_{}x{}", grid.nx, grid.ny),
        lower,
        vec![f64::INFINITY; n],
    )
}

/// Distance to the boundary of the unit square.
pub fn boundary_distance(xi1: f64, xi2: f64) -> f64 {
    xi1.min(xi2).min(1.0 - xi1).min(1.0 - xi2)
}

/// Elastic-plastic torsion: `|v| ≤ dist(ξ, ∂D)` with constant load `c`.
pub fn torsion(grid: &GridSpec, load: f64) -> Result<MCProblem> {
    if !load.is_finite() {
        return Err(Error::InvalidInput("torsion load must be finite".into()));
    }
    let laplacian = weighted_laplacian(grid, |_, _| 1.0);
    let n = grid.n();
    let area = grid.hx * grid.hy;
    let dist: Vec<f64> = grid.nodes().map(|(_, _, x1, x2)| boundary_distance(x1, x2)).collect();
    let lower = dist.iter().map(|d| -d).collect();
    StencilOperator::new(laplacian, Source::Constant(vec![-load * area; n])).into_problem(
        format!("torsion_{}x{}_c{}", grid.nx, grid.ny, load),
        lower,
        dist,
    )
}

/// Bratu-type combustion model `−Δv − λe^v` with `v ≥ 0`.
pub fn combustion(grid: &GridSpec, lambda: f64) -> Result<MCProblem> {
    if !(lambda > 0.0 && lambda < COMBUSTION_LAMBDA_MAX) {
        return Err(Error::InvalidInput(format!(
            "lambda {lambda} must lie in (0, {COMBUSTION_LAMBDA_MAX})"
        )));
    }
    let laplacian = weighted_laplacian(grid, |_, _| 1.0);
    let n = grid.n();
    let scale = lambda * grid.hx * grid.hy;
    StencilOperator::new(laplacian, Source::Exponential(scale)).into_problem(
        format!("combustion_{}x{}_l{}", grid.nx, grid.ny, lambda),
        vec![0.0; n],
        vec![f64::INFINITY; n],
    )
}
