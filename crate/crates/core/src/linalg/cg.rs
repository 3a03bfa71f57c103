use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};
use crate::linalg::{Preconditioner, SparseMatrix};

/// Outcome of one linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearSolveStats {
    pub iterations: usize,
    pub achieved_relative_residual: f64,
    /// Set on a non-positive curvature `pᵀAp ≤ 0`, a non-finite iterate, or
    /// when `max_iter` is reached before the tolerance.
    pub breakdown_flag: bool,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned conjugate gradients for symmetric positive definite `A`.
///
/// Stops when `‖b − Ax‖₂ ≤ rtol·‖b‖₂` (recursive residual). On breakdown or
/// iteration exhaustion the iterate with the smallest residual seen so far is
/// returned with `breakdown_flag` set.
pub fn cg_solve(
    a: &SparseMatrix,
    b: &[f64],
    m: &Preconditioner,
    rtol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, LinearSolveStats)> {
    let n = a.n_rows();
    check_len(n, a.n_cols())?;
    check_len(n, b.len())?;
    check_len(n, m.dim())?;

    let mut x = vec![0.0; n];
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok((x, LinearSolveStats::default()));
    }
    let target = rtol * bnorm;
    let mut r = b.to_vec();
    let mut z = m.apply(&r);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rnorm = bnorm;
    let mut best = (rnorm, x.clone());
    let mut stats = LinearSolveStats {
        iterations: 0,
        achieved_relative_residual: 1.0,
        breakdown_flag: false,
    };

    while rnorm > target {
        if stats.iterations >= max_iter {
            stats.breakdown_flag = true;
            break;
        }
        a.spmv_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) || !rz.is_finite() {
            stats.breakdown_flag = true;
            break;
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        stats.iterations += 1;
        rnorm = norm2(&r);
        if !rnorm.is_finite() {
            stats.breakdown_flag = true;
            break;
        }
        if rnorm < best.0 {
            best.0 = rnorm;
            best.1.copy_from_slice(&x);
        }
        if rnorm <= target {
            break;
        }
        m.apply_into(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    if stats.breakdown_flag {
        stats.achieved_relative_residual = best.0 / bnorm;
        return Ok((best.1, stats));
    }
    stats.achieved_relative_residual = rnorm / bnorm;
    Ok((x, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_system() {
        let a = SparseMatrix::diagonal(&[2.0, 4.0]).unwrap();
        let (x, stats) = cg_solve(&a, &[2.0, 4.0], &Preconditioner::identity(2), 1e-12, 10).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert!(!stats.breakdown_flag);
    }

    #[test]
    fn zero_rhs() {
        let a = SparseMatrix::diagonal(&[2.0, 4.0]).unwrap();
        let (x, stats) = cg_solve(&a, &[0.0, 0.0], &Preconditioner::identity(2), 1e-8, 10).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn indefinite_flags_breakdown() {
        let a = SparseMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let (x, stats) = cg_solve(&a, &[1.0, 1.0], &Preconditioner::identity(2), 1e-10, 10).unwrap();
        assert!(stats.breakdown_flag);
        assert!(x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn iteration_cap_flags_breakdown() {
        let a = SparseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let (_, stats) = cg_solve(&a, &[1.0; 4], &Preconditioner::identity(4), 1e-14, 1).unwrap();
        assert!(stats.breakdown_flag);
        assert_eq!(stats.iterations, 1);
    }
}
