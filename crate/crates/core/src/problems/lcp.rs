//! Linear complementarity problems and an enumeration oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::{BandLu, SparseMatrix};
use crate::model::MCProblem;

/// Largest dimension accepted by the enumeration oracle.
pub const BRUTE_FORCE_MAX_N: usize = 20;

/// `F(x) = Mx + q` with `M` given row-major; the Jacobian is `M` in CSR form.
pub fn lcp(name: impl Into<String>, m: &[f64], q: &[f64], lower: Vec<f64>, upper: Vec<f64>) -> Result<MCProblem> {
    let n = q.len();
    check_len(n * n, m.len())?;
    if m.iter().chain(q).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("LCP data"));
    }
    let jac = SparseMatrix::from_dense(n, n, m)?;
    let residual_matrix = jac.clone();
    let q = q.to_vec();
    MCProblem::new(
        name,
        lower,
        upper,
        move |x| {
            let mut f = residual_matrix.spmv(x).unwrap_or_else(|_| vec![f64::NAN; q.len()]);
            f.iter_mut().zip(&q).for_each(|(fi, qi)| *fi += qi);
            f
        },
        move |_| Ok(jac.clone()),
    )
}

/// Standard LCP: `x ≥ 0`, `Mx + q ≥ 0`, complementary.
pub fn lcp_nonneg(name: impl Into<String>, m: &[f64], q: &[f64]) -> Result<MCProblem> {
    let n = q.len();
    lcp(name, m, q, vec![0.0; n], vec![f64::INFINITY; n])
}

/// Strongly monotone instance `M = BᵀB + I` with `B` and `q` uniform in `[-1, 1]`
/// (scaled by 2 for `q`), reproducible from `seed`.
pub fn random_monotone_lcp(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum();
            m[i * n + j] = s + if i == j { 1.0 } else { 0.0 };
        }
    }
    let q = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    (m, q)
}

fn check_candidate(m: &[f64], q: &[f64], basis: &[usize]) -> Option<Vec<f64>> {
    let n = q.len();
    let mut x = vec![0.0; n];
    if !basis.is_empty() {
        let k = basis.len();
        let sub: Vec<f64> = basis
            .iter()
            .flat_map(|&i| basis.iter().map(move |&j| m[i * n + j]))
            .collect();
        let a = SparseMatrix::from_dense(k, k, &sub).ok()?;
        let rhs: Vec<f64> = basis.iter().map(|&i| -q[i]).collect();
        let xs = BandLu::factor(&a).ok()?.solve(&rhs).ok()?;
        for (&i, v) in basis.iter().zip(xs) {
            x[i] = v;
        }
    }
    let scale = 1.0 + q.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-10 * scale;
    if x.iter().any(|&v| v < -tol) {
        return None;
    }
    for i in 0..n {
        let fi: f64 = (0..n).map(|j| m[i * n + j] * x[j]).sum::<f64>() + q[i];
        if fi < -tol {
            return None;
        }
    }
    Some(x.into_iter().map(|v| v.max(0.0)).collect())
}

fn enumerate(m: &[f64], q: &[f64], mut visit: impl FnMut(Vec<f64>) -> bool) -> Result<()> {
    let n = q.len();
    check_len(n * n, m.len())?;
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            cap: BRUTE_FORCE_MAX_N,
        });
    }
    for mask in 0u32..(1u32 << n) {
        let basis: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if let Some(x) = check_candidate(m, q, &basis) {
            if !visit(x) {
                break;
            }
        }
    }
    Ok(())
}

/// Solves the standard LCP by trying every complementary basis: for each
/// subset `S`, `x_S` solves `M_SS x_S = −q_S` and `x` elsewhere is zero.
/// Returns the first candidate with `x ≥ 0` and `Mx + q ≥ 0`.
pub fn lcp_brute_force(m: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    let mut found = None;
    enumerate(m, q, |x| {
        found = Some(x);
        false
    })?;
    found.ok_or(Error::NoSolution)
}

/// Every distinct solution reachable by basis enumeration.
pub fn lcp_brute_force_all(m: &[f64], q: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut all: Vec<Vec<f64>> = Vec::new();
    enumerate(m, q, |x| {
        let duplicate = all.iter().any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-9));
        if !duplicate {
            all.push(x);
        }
        true
    })?;
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::complementarity_error;

    #[test]
    fn identity_lcp() {
        let p = lcp_nonneg("id", &[1.0, 0.0, 0.0, 1.0], &[1.0, -2.0]).unwrap();
        assert_eq!(complementarity_error(&p, &[0.0, 2.0]).unwrap(), 0.0);
        assert_eq!(
            lcp_brute_force(&[1.0, 0.0, 0.0, 1.0], &[1.0, -2.0]).unwrap(),
            vec![0.0, 2.0]
        );
        assert_eq!(
            lcp_brute_force(&[1.0, 0.0, 0.0, 1.0], &[1.0, 1.0]).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn two_by_two_oracle() {
        let m = [2.0, 1.0, 1.0, 2.0];
        let q = [-3.0, -3.0];
        let x = lcp_brute_force(&m, &q).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        // substitution: F(1,1) = 0
        let p = lcp_nonneg("m", &m, &q).unwrap();
        assert!(p.eval_f(&[1.0, 1.0]).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn random_monotone_self_certifies() {
        for seed in 0..5 {
            let (m, q) = random_monotone_lcp(8, seed);
            let x = lcp_brute_force(&m, &q).unwrap();
            let p = lcp_nonneg("r", &m, &q).unwrap();
            assert!(complementarity_error(&p, &x).unwrap() <= 1e-10);
            // positive definite M ⇒ unique solution
            assert_eq!(lcp_brute_force_all(&m, &q).unwrap().len(), 1);
        }
    }

    #[test]
    fn random_instances_are_reproducible() {
        assert_eq!(random_monotone_lcp(4, 9), random_monotone_lcp(4, 9));
        assert_ne!(random_monotone_lcp(4, 9), random_monotone_lcp(4, 10));
    }

    #[test]
    fn no_solution_reported() {
        // x ≥ 0 and -x - 1 ≥ 0 is infeasible
        assert_eq!(lcp_brute_force(&[-1.0], &[-1.0]), Err(Error::NoSolution));
    }

    #[test]
    fn oracle_size_cap() {
        let n = BRUTE_FORCE_MAX_N + 1;
        assert!(matches!(
            lcp_brute_force(&vec![0.0; n * n], &vec![0.0; n]),
            Err(Error::TooLarge { .. })
        ));
    }
}
