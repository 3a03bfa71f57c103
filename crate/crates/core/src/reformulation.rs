//! Fischer–Burmeister reformulation of the box complementarity conditions.
//!
//! Each component is mapped to a scalar equation according to which bounds
//! are finite:
//!
//! | bounds          | Φ_i                                   |
//! |-----------------|---------------------------------------|
//! | `[l, ∞)`        | φ(x − l, F)                           |
//! | `(−∞, u]`       | −φ(u − x, −F)                         |
//! | `(−∞, ∞)`       | F                                     |
//! | `[l, u]`        | φ(x − l, −φ(u − x, −F))               |
//!
//! with φ(a, b) = a + b − √(a² + b²). A generalized Jacobian element is
//! `H = D_a + D_b ∇F` with nonnegative diagonals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::model::{IndexPartition, MCProblem};

/// φ_FB(a, b) = a + b − √(a² + b²).
pub fn fb(a: f64, b: f64) -> f64 {
    a + b - a.hypot(b)
}

/// Partial derivatives of φ_FB. At the origin the element with
/// (α, β) = (1/√2, 1/√2) on the unit circle is returned.
pub fn fb_partials(a: f64, b: f64) -> (f64, f64) {
    let r = a.hypot(b);
    if r > 0.0 {
        (1.0 - a / r, 1.0 - b / r)
    } else {
        let t = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
        (t, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundPattern {
    Lower,
    Upper,
    Free,
    Boxed,
}

impl BoundPattern {
    pub fn of(lower: f64, upper: f64) -> Self {
        match (lower.is_finite(), upper.is_finite()) {
            (true, false) => BoundPattern::Lower,
            (false, true) => BoundPattern::Upper,
            (false, false) => BoundPattern::Free,
            (true, true) => BoundPattern::Boxed,
        }
    }
}

/// Scalar residual for one component.
pub fn phi_component(lower: f64, upper: f64, x: f64, f: f64) -> f64 {
    match BoundPattern::of(lower, upper) {
        BoundPattern::Lower => fb(x - lower, f),
        BoundPattern::Upper => -fb(upper - x, -f),
        BoundPattern::Free => f,
        BoundPattern::Boxed => fb(x - lower, -fb(upper - x, -f)),
    }
}

/// Diagonal entries `(d_a, d_b)` of one component of `H = D_a + D_b ∇F`.
pub fn diagonal_component(lower: f64, upper: f64, x: f64, f: f64) -> (f64, f64) {
    match BoundPattern::of(lower, upper) {
        BoundPattern::Lower => fb_partials(x - lower, f),
        BoundPattern::Upper => fb_partials(upper - x, -f),
        BoundPattern::Free => (0.0, 1.0),
        BoundPattern::Boxed => {
            let a = x - lower;
            let gap = upper - x;
            let inner = -fb(gap, -f);
            let (p, q) = fb_partials(a, inner);
            let (r, s) = fb_partials(gap, -f);
            (p + q * r, q * s)
        }
    }
}

/// Φ(x) given `f = F(x)`.
pub fn residual_phi(problem: &MCProblem, x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    crate::error::check_len(problem.dim(), x.len())?;
    crate::error::check_len(problem.dim(), f.len())?;
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("residual function"));
    }
    let (lo, up) = (problem.lower(), problem.upper());
    Ok((0..x.len()).map(|i| phi_component(lo[i], up[i], x[i], f[i])).collect())
}

/// Ψ = ½‖Φ‖₂².
pub fn merit(phi: &[f64]) -> f64 {
    0.5 * phi.iter().map(|v| v * v).sum::<f64>()
}

/// The diagonals `D_a`, `D_b` of a generalized Jacobian `D_a + D_b ∇F`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPair {
    pub d_a: Vec<f64>,
    pub d_b: Vec<f64>,
}

pub fn subdiff_diagonals(problem: &MCProblem, x: &[f64], f: &[f64]) -> DiagonalPair {
    let (lo, up) = (problem.lower(), problem.upper());
    let (d_a, d_b) = (0..x.len())
        .map(|i| diagonal_component(lo[i], up[i], x[i], f[i]))
        .unzip();
    DiagonalPair { d_a, d_b }
}

/// H = diag(d_a) + diag(d_b)·J.
pub fn assemble_subdiff(j: &SparseMatrix, d: &DiagonalPair) -> Result<SparseMatrix> {
    j.scale_rows(&d.d_b)?.add_diagonal(&d.d_a)
}

/// ∇Ψ = Hᵀ Φ = d_a∘Φ + Jᵀ(d_b∘Φ).
pub fn merit_gradient(j: &SparseMatrix, d: &DiagonalPair, phi: &[f64]) -> Result<Vec<f64>> {
    let scaled: Vec<f64> = d.d_b.iter().zip(phi).map(|(b, p)| b * p).collect();
    let mut g = j.spmv_transpose(&scaled)?;
    for ((gi, a), p) in g.iter_mut().zip(&d.d_a).zip(phi) {
        *gi += a * p;
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonSource {
    Dynamic,
    Fixed,
}

/// Threshold on `d_b` below which a component is treated as active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveSetRule {
    pub epsilon: f64,
    pub source: EpsilonSource,
}

/// ε(x) = min(½‖Φ‖², 10⁻²) / (1 + ‖∇F‖₁), or the fixed override.
pub fn active_epsilon(phi: &[f64], j: &SparseMatrix, override_eps: Option<f64>) -> ActiveSetRule {
    match override_eps {
        Some(epsilon) => ActiveSetRule {
            epsilon,
            source: EpsilonSource::Fixed,
        },
        None => ActiveSetRule {
            epsilon: merit(phi).min(1e-2) / (1.0 + j.norm_one()),
            source: EpsilonSource::Dynamic,
        },
    }
}

/// Active = {i : d_b_i ≤ ε}.
pub fn partition_by_db(d: &DiagonalPair, rule: ActiveSetRule) -> IndexPartition {
    IndexPartition::from_predicate(d.d_b.len(), |i| d.d_b[i] <= rule.epsilon)
}
