//! Problem abstraction and the configuration/report types shared by both solvers.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::SparseMatrix;

type ResidualFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type JacobianFn = dyn Fn(&[f64]) -> Result<SparseMatrix> + Send + Sync;

/// A mixed complementarity problem: find `lower ≤ x ≤ upper` such that for
/// each i, `F_i(x) ≥ 0` if `x_i = lower_i`, `F_i(x) ≤ 0` if `x_i = upper_i`,
/// and `F_i(x) = 0` strictly between the bounds.
///
/// Infinite bounds use IEEE infinities. Evaluators must be pure functions of
/// `x`, and the Jacobian pattern must not depend on `x`.
#[derive(Clone)]
pub struct MCProblem {
    name: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    residual: Arc<ResidualFn>,
    jacobian: Arc<JacobianFn>,
}

impl fmt::Debug for MCProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MCProblem")
            .field("name", &self.name)
            .field("n", &self.lower.len())
            .finish_non_exhaustive()
    }
}

impl MCProblem {
    pub fn new<F, J>(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        residual: F,
        jacobian: J,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        J: Fn(&[f64]) -> Result<SparseMatrix> + Send + Sync + 'static,
    {
        check_len(lower.len(), upper.len())?;
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l >= u {
                return Err(Error::InvalidBounds {
                    index: i,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            lower,
            upper,
            residual: Arc::new(residual),
            jacobian: Arc::new(jacobian),
        })
    }

    /// Nonlinear complementarity problem with `lower = 0`, `upper = +∞`.
    pub fn ncp<F, J>(name: impl Into<String>, n: usize, residual: F, jacobian: J) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        J: Fn(&[f64]) -> Result<SparseMatrix> + Send + Sync + 'static,
    {
        Self::new(name, vec![0.0; n], vec![f64::INFINITY; n], residual, jacobian)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn eval_f(&self, x: &[f64]) -> Vec<f64> {
        (self.residual)(x)
    }

    /// Fails only when the Jacobian has non-finite entries at `x`.
    pub fn eval_jacobian(&self, x: &[f64]) -> Result<SparseMatrix> {
        (self.jacobian)(x)
    }

    /// Componentwise projection onto `[lower, upper]`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| v.max(l).min(u))
            .collect()
    }
}

/// Clamps a starting point into the bounds; rejects wrong length or non-finite entries.
pub fn validate_start_point(problem: &MCProblem, x0: &[f64]) -> Result<Vec<f64>> {
    check_len(problem.dim(), x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("starting point has non-finite entries".into()));
    }
    Ok(problem.project(x0))
}

/// ∞-norm of the mid-function residual `x − clamp(x − F(x), lower, upper)`,
/// evaluated at the projection of `x` onto the bounds. Zero exactly at solutions.
pub fn complementarity_error(problem: &MCProblem, x: &[f64]) -> Result<f64> {
    check_len(problem.dim(), x.len())?;
    let xp = problem.project(x);
    let f = problem.eval_f(&xp);
    check_len(problem.dim(), f.len())?;
    complementarity_error_with(problem, &xp, &f)
}

/// As [`complementarity_error`] with `F(x)` supplied and `x` assumed feasible.
pub fn complementarity_error_with(problem: &MCProblem, x: &[f64], f: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        if !f[i].is_finite() {
            return Err(Error::NonFinite("residual function"));
        }
        let mid = (x[i] - f[i]).max(problem.lower[i]).min(problem.upper[i]);
        worst = worst.max((x[i] - mid).abs());
    }
    Ok(worst)
}

/// Largest entrywise gap between `∇F(x)` and a central-difference estimate,
/// divided by the largest `|∇F(x)|` entry (absolute when `∇F(x) = 0`).
pub fn jacobian_fd_error(problem: &MCProblem, x: &[f64]) -> Result<f64> {
    check_len(problem.dim(), x.len())?;
    let n = x.len();
    let dense = problem.eval_jacobian(x)?.to_dense();
    let scale = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    let mut probe = x.to_vec();
    for c in 0..n {
        let h = 1e-6 * x[c].abs().max(1.0);
        probe[c] = x[c] + h;
        let fp = problem.eval_f(&probe);
        probe[c] = x[c] - h;
        let fm = problem.eval_f(&probe);
        probe[c] = x[c];
        for r in 0..n {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            if !fd.is_finite() {
                return Err(Error::NonFinite("finite-difference Jacobian"));
            }
            worst = worst.max((dense[r * n + c] - fd).abs());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Active/inactive split of `0..n` with the map from full to reduced indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    pub active: Vec<usize>,
    pub inactive: Vec<usize>,
    pub full_to_reduced: Vec<Option<usize>>,
}

impl IndexPartition {
    /// Splits `0..n` by a predicate; `true` marks an active index.
    pub fn from_predicate(n: usize, mut is_active: impl FnMut(usize) -> bool) -> Self {
        let mut active = Vec::new();
        let mut inactive = Vec::new();
        let mut full_to_reduced = vec![None; n];
        for i in 0..n {
            if is_active(i) {
                active.push(i);
            } else {
                full_to_reduced[i] = Some(inactive.len());
                inactive.push(i);
            }
        }
        Self {
            active,
            inactive,
            full_to_reduced,
        }
    }

    pub fn dim(&self) -> usize {
        self.full_to_reduced.len()
    }
}

/// Parameters shared by the semismooth and reduced-space methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_linear_solves: usize,
    pub inner_rtol: f64,
    pub rho: f64,
    pub p_exp: f64,
    pub beta: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub max_backtracks: usize,
    pub epsilon_override: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_linear_solves: 100,
            inner_rtol: 1e-2,
            rho: 1e-10,
            p_exp: 2.1,
            beta: 0.5,
            sigma: 1e-4,
            gamma: 1e-12,
            max_backtracks: 50,
            epsilon_override: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if !(self.sigma > 0.0 && self.sigma < 0.5) {
            return bad("sigma must lie in (0, 1/2)");
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return bad("rho must be positive");
        }
        if !(self.p_exp > 2.0) || !self.p_exp.is_finite() {
            return bad("p_exp must exceed 2");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.tol >= 0.0) || !self.tol.is_finite() {
            return bad("tol must be nonnegative");
        }
        if !(self.inner_rtol > 0.0) || !self.inner_rtol.is_finite() {
            return bad("inner_rtol must be positive");
        }
        if let Some(eps) = self.epsilon_override {
            if !(0.0..1.0).contains(&eps) {
                return bad("epsilon_override must lie in [0, 1)");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    LinearSolveBudgetExhausted,
    LineSearchFailure,
    StationaryOrFailed,
    LinearSolverBreakdown,
    InvalidInput,
    NumericalBreakdown,
}

impl Status {
    pub fn is_converged(self) -> bool {
        self == Status::Converged
    }
}

/// One outer iteration: the residual is measured at the accepted iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual_norm: f64,
    pub step_size: f64,
    pub active_count: usize,
    pub gradient_fallback: bool,
    pub inner_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverReport {
    pub status: Status,
    pub outer_iterations: usize,
    pub linear_solves: usize,
    pub inner_iterations_total: usize,
    #[serde(with = "lossless_f64")]
    pub initial_residual: f64,
    /// ‖Φ‖₂ for the semismooth method, ‖F_Ω‖₂ for the reduced-space method.
    #[serde(with = "lossless_f64")]
    pub final_residual: f64,
    pub history: Vec<IterationRecord>,
    pub wall_time_seconds: f64,
}

impl SolverReport {
    pub(crate) fn new() -> Self {
        Self {
            status: Status::InvalidInput,
            outer_iterations: 0,
            linear_solves: 0,
            inner_iterations_total: 0,
            initial_residual: f64::NAN,
            final_residual: f64::NAN,
            history: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }
}

/// Serializes finite values as numbers and NaN/±∞ as the strings
/// `"NaN"`, `"inf"`, `"-inf"`, so reports round-trip through JSON.
pub mod lossless_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("unrecognized float {other:?}"))),
            },
        }
    }
}

/// Final iterate together with its report.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub report: SolverReport,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounded(lower: Vec<f64>, upper: Vec<f64>, f: Vec<f64>) -> MCProblem {
        let n = lower.len();
        MCProblem::new(
            "t",
            lower,
            upper,
            move |_| f.clone(),
            move |_| Ok(SparseMatrix::zeros(n, n)),
        )
        .unwrap()
    }

    #[test]
    fn clamp_examples() {
        let nonneg = bounded(vec![0.0; 2], vec![f64::INFINITY; 2], vec![0.0; 2]);
        assert_eq!(validate_start_point(&nonneg, &[-1.0, 0.5]).unwrap(), vec![0.0, 0.5]);
        let unit = bounded(vec![0.0; 2], vec![1.0; 2], vec![0.0; 2]);
        assert_eq!(validate_start_point(&unit, &[0.2, 0.8]).unwrap(), vec![0.2, 0.8]);
        assert_eq!(validate_start_point(&unit, &[2.0, -3.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn start_point_errors() {
        let p = bounded(vec![0.0; 2], vec![1.0; 2], vec![0.0; 2]);
        assert!(matches!(
            validate_start_point(&p, &[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            validate_start_point(&p, &[0.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn equal_bounds_rejected() {
        let r = MCProblem::new(
            "x",
            vec![1.0],
            vec![1.0],
            |x: &[f64]| x.to_vec(),
            |_: &[f64]| Ok(SparseMatrix::identity(1)),
        );
        assert!(matches!(r, Err(Error::InvalidBounds { index: 0, .. })));
    }

    #[test]
    fn complementarity_error_examples() {
        let p = bounded(vec![0.0; 2], vec![f64::INFINITY; 2], vec![5.0, 0.0]);
        assert_eq!(complementarity_error(&p, &[0.0, 2.0]).unwrap(), 0.0);
        let q = bounded(vec![0.0; 2], vec![f64::INFINITY; 2], vec![-3.0, 1.0]);
        assert_eq!(complementarity_error(&q, &[0.0, 0.0]).unwrap(), 3.0);
        // F(x) = Mx + q at x = (1,1) with M = [[2,1],[1,2]], q = (-3,-3) vanishes
        let lcp = MCProblem::ncp(
            "lcp",
            2,
            |x: &[f64]| vec![2.0 * x[0] + x[1] - 3.0, x[0] + 2.0 * x[1] - 3.0],
            |_: &[f64]| SparseMatrix::from_dense(2, 2, &[2.0, 1.0, 1.0, 2.0]),
        )
        .unwrap();
        assert_eq!(complementarity_error(&lcp, &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn complementarity_error_non_finite() {
        let p = bounded(vec![0.0], vec![f64::INFINITY], vec![f64::NAN]);
        assert!(matches!(complementarity_error(&p, &[1.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn default_config_is_valid() {
        SolverConfig::default().validate().unwrap();
        let bad = SolverConfig {
            sigma: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            epsilon_override: Some(1.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn partition_invariants() {
        let p = IndexPartition::from_predicate(5, |i| i % 2 == 0);
        assert_eq!(p.active, vec![0, 2, 4]);
        assert_eq!(p.inactive, vec![1, 3]);
        assert_eq!(p.full_to_reduced, vec![None, Some(0), None, Some(1), None]);
    }
}
