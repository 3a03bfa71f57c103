//! A small bundled robustness suite with certified solutions.

use crate::error::Result;
use crate::linalg::SparseMatrix;
use crate::model::{complementarity_error, MCProblem};
use crate::problems::lcp::{lcp, lcp_brute_force_all, lcp_nonneg, random_monotone_lcp};
use crate::problems::pde::{combustion, journal_bearing, obstacle, torsion, BearingParams};
use crate::problems::GridSpec;

/// Tolerance on the mid-function residual for a suite run to count as solved.
pub const SUITE_CERTIFICATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteCategory {
    /// Strongly monotone (positive definite `M`).
    MonotoneLcp,
    /// Monotone but singular symmetric part.
    SemidefiniteLcp,
    BoundaryScalar,
    DegenerateLcp,
    BoxBound,
    Nonmonotone,
    Nonlinear,
    Discretized,
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub problem: MCProblem,
    pub x0: Vec<f64>,
    pub category: SuiteCategory,
    /// Certified solutions when known in closed form or by enumeration;
    /// empty means only the residual predicate certifies.
    pub known_solutions: Vec<Vec<f64>>,
}

impl SuiteInstance {
    pub fn name(&self) -> &str {
        self.problem.name()
    }

    /// Whether `x` solves the instance to [`SUITE_CERTIFICATION_TOL`].
    pub fn certifies(&self, x: &[f64]) -> bool {
        complementarity_error(&self.problem, x).is_ok_and(|e| e <= SUITE_CERTIFICATION_TOL)
    }

    /// ∞-distance to the nearest known solution, if any are recorded.
    pub fn distance_to_known(&self, x: &[f64]) -> Option<f64> {
        self.known_solutions
            .iter()
            .map(|s| s.iter().zip(x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            .min_by(|a, b| a.total_cmp(b))
    }
}

fn affine(name: &str, m: &[f64], q: &[f64], lower: Vec<f64>, upper: Vec<f64>) -> Result<MCProblem> {
    lcp(name, m, q, lower, upper)
}

fn instance(problem: MCProblem, x0: Vec<f64>, category: SuiteCategory, known: Vec<Vec<f64>>) -> SuiteInstance {
    SuiteInstance {
        problem,
        x0,
        category,
        known_solutions: known,
    }
}

fn monotone_lcp_instance(n: usize, seed: u64) -> Result<SuiteInstance> {
    let (m, q) = random_monotone_lcp(n, seed);
    let known = lcp_brute_force_all(&m, &q)?;
    let p = lcp_nonneg(format!("monotone_lcp_n{n}_s{seed}"), &m, &q)?;
    Ok(instance(p, vec![0.0; n], SuiteCategory::MonotoneLcp, known))
}

fn kojima_shindo() -> Result<MCProblem> {
    MCProblem::ncp(
        "kojima_shindo",
        4,
        |x: &[f64]| {
            let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
            vec![
                3.0 * a * a + 2.0 * a * b + 2.0 * b * b + c + 3.0 * d - 6.0,
                2.0 * a * a + a + b * b + 10.0 * c + 2.0 * d - 2.0,
                3.0 * a * a + a * b + 2.0 * b * b + 2.0 * c + 9.0 * d - 9.0,
                a * a + 3.0 * b * b + 2.0 * c + 3.0 * d - 3.0,
            ]
        },
        |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            SparseMatrix::from_dense(
                4,
                4,
                &[
                    6.0 * a + 2.0 * b,
                    2.0 * a + 4.0 * b,
                    1.0,
                    3.0,
                    4.0 * a + 1.0,
                    2.0 * b,
                    10.0,
                    2.0,
                    6.0 * a + b,
                    a + 4.0 * b,
                    2.0,
                    9.0,
                    2.0 * a,
                    6.0 * b,
                    2.0,
                    3.0,
                ],
            )
        },
    )
}

/// `F(x) = Mx + q + x³/10` with monotone `M`: strongly monotone, nonlinear.
fn cubic_monotone(n: usize, seed: u64) -> Result<MCProblem> {
    let (m, q) = random_monotone_lcp(n, seed);
    let jac_m = SparseMatrix::from_dense(n, n, &m)?;
    let res_m = jac_m.clone();
    let diag_pos: Vec<usize> = jac_m.diagonal_positions().into_iter().map(|p| p.unwrap()).collect();
    MCProblem::ncp(
        format!("cubic_monotone_n{n}"),
        n,
        move |x: &[f64]| {
            let mut f = res_m.spmv(x).unwrap_or_else(|_| vec![f64::NAN; n]);
            for i in 0..n {
                f[i] += q[i] + 0.1 * x[i].powi(3);
            }
            f
        },
        move |x: &[f64]| {
            let mut v = jac_m.values().to_vec();
            for (i, &p) in diag_pos.iter().enumerate() {
                v[p] += 0.3 * x[i] * x[i];
            }
            jac_m.with_values(v)
        },
    )
}

/// Free variable coupled to a nonnegative one: solution `(ln 2, 1 − ln 2)`.
fn mixed_exponential() -> Result<MCProblem> {
    MCProblem::new(
        "mixed_exponential",
        vec![f64::NEG_INFINITY, 0.0],
        vec![f64::INFINITY, f64::INFINITY],
        |x: &[f64]| vec![x[0].exp() - 2.0, x[1] + x[0] - 1.0],
        |x: &[f64]| SparseMatrix::from_dense(2, 2, &[x[0].exp(), 0.0, 1.0, 1.0]),
    )
}

/// The bundled suite: 27 instances over eight categories.
#[allow(clippy::vec_init_then_push)]
pub fn small_suite() -> Result<Vec<SuiteInstance>> {
    use SuiteCategory::*;
    let inf = f64::INFINITY;
    let mut out = Vec::new();

    out.push(instance(
        affine("scalar_degenerate", &[1.0], &[0.0], vec![0.0], vec![inf])?,
        vec![1.0],
        BoundaryScalar,
        vec![vec![0.0]],
    ));
    out.push(instance(
        affine("scalar_box_upper", &[0.0], &[-1.0], vec![0.0], vec![1.0])?,
        vec![0.0],
        BoundaryScalar,
        vec![vec![1.0]],
    ));
    out.push(instance(
        affine("scalar_lower_active", &[1.0], &[1.0], vec![0.0], vec![inf])?,
        vec![1.0],
        BoundaryScalar,
        vec![vec![0.0]],
    ));
    out.push(instance(
        affine("scalar_interior", &[1.0], &[-1.0], vec![0.0], vec![inf])?,
        vec![3.0],
        BoundaryScalar,
        vec![vec![1.0]],
    ));
    out.push(instance(
        affine("scalar_upper_only", &[1.0], &[-5.0], vec![f64::NEG_INFINITY], vec![2.0])?,
        vec![0.0],
        BoundaryScalar,
        vec![vec![2.0]],
    ));

    out.push(instance(
        lcp_nonneg("lcp2_pd", &[2.0, 1.0, 1.0, 2.0], &[-3.0, -3.0])?,
        vec![0.0; 2],
        MonotoneLcp,
        vec![vec![1.0, 1.0]],
    ));
    out.push(instance(
        lcp_nonneg("lcp2_identity", &[1.0, 0.0, 0.0, 1.0], &[1.0, -2.0])?,
        vec![0.0; 2],
        MonotoneLcp,
        vec![vec![0.0, 2.0]],
    ));
    out.push(instance(
        lcp_nonneg("lcp2_skew", &[0.0, 1.0, -1.0, 0.0], &[-1.0, 2.0])?,
        vec![0.0; 2],
        SemidefiniteLcp,
        vec![vec![2.0, 1.0]],
    ));
    for (n, seed) in [(4, 11), (6, 12), (8, 13), (10, 14), (10, 15)] {
        out.push(monotone_lcp_instance(n, seed)?);
    }

    out.push(instance(
        lcp_nonneg("degenerate_lcp2", &[1.0, 0.0, 0.0, 1.0], &[0.0, -1.0])?,
        vec![0.0; 2],
        DegenerateLcp,
        vec![vec![0.0, 1.0]],
    ));
    let m3 = [1.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0];
    let q3 = [-1.0, -2.0, 0.0];
    out.push(instance(
        lcp_nonneg("degenerate_lcp3", &m3, &q3)?,
        vec![0.0; 3],
        DegenerateLcp,
        lcp_brute_force_all(&m3, &q3)?,
    ));
    let m4 = [
        -1.0, 0.5, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 2.0,
    ];
    let q4 = [0.5, -2.0, 1.0, -4.0];
    out.push(instance(
        lcp_nonneg("nonmonotone_lcp4", &m4, &q4)?,
        vec![0.0; 4],
        Nonmonotone,
        lcp_brute_force_all(&m4, &q4)?,
    ));

    let tri = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
    out.push(instance(
        affine("box_lcp3", &tri, &[1.0, 0.0, -2.0], vec![0.0; 3], vec![1.0; 3])?,
        vec![0.5; 3],
        BoxBound,
        vec![vec![0.0, 0.5, 1.0]],
    ));
    out.push(instance(
        affine(
            "mixed_free_lcp2",
            &[2.0, 1.0, 1.0, 2.0],
            &[-1.0, 1.0],
            vec![f64::NEG_INFINITY, 0.0],
            vec![inf, inf],
        )?,
        vec![0.0; 2],
        BoxBound,
        vec![vec![0.5, 0.0]],
    ));
    let (mb, qb) = random_monotone_lcp(6, 21);
    out.push(instance(
        affine("box_monotone_n6", &mb, &qb, vec![-0.5; 6], vec![0.5; 6])?,
        vec![0.0; 6],
        BoxBound,
        vec![],
    ));

    let half = 6f64.sqrt() / 2.0;
    out.push(instance(
        kojima_shindo()?,
        vec![0.0; 4],
        Nonlinear,
        vec![vec![half, 0.0, 0.0, 0.5], vec![1.0, 0.0, 3.0, 0.0]],
    ));
    out.push(instance(cubic_monotone(5, 31)?, vec![0.0; 5], Nonlinear, vec![]));
    let ln2 = std::f64::consts::LN_2;
    out.push(instance(
        mixed_exponential()?,
        vec![0.0; 2],
        Nonlinear,
        vec![vec![ln2, 1.0 - ln2]],
    ));

    let g6 = GridSpec::unit_square(6, 6)?;
    out.push(instance(combustion(&g6, 6.0)?, vec![0.0; 36], Nonmonotone, vec![]));
    let tp = torsion(&g6, 5.0)?;
    out.push(instance(tp, vec![0.0; 36], Discretized, vec![]));
    let op = obstacle(&g6)?;
    let x0 = op.project(&vec![0.0; 36]);
    out.push(instance(op, x0, Discretized, vec![]));
    let bearing = BearingParams::new(0.5, 10.0)?;
    out.push(instance(
        journal_bearing(&bearing.grid(8, 8)?, &bearing)?,
        vec![0.0; 64],
        Discretized,
        vec![],
    ));
    let c4 = GridSpec::unit_square(4, 4)?;
    out.push(instance(combustion(&c4, 2.0)?, vec![0.0; 16], Discretized, vec![]));

    Ok(out)
}
