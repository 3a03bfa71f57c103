use compsolve::linalg::{cg_solve, dense_lu_solve, Preconditioner, PreconditionerKind, SparseMatrix};
use compsolve::model::{validate_start_point, IndexPartition, MCProblem};
use compsolve::reformulation::{
    active_epsilon, fb, fb_partials, partition_by_db, phi_component, subdiff_diagonals, DiagonalPair,
};
use compsolve::ssls::{reduced_matrix, SemismoothState};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -10.0..10.0f64, -1e-3..1e-3f64]
}

/// Random row-major matrix with roughly 60% zeros.
fn dense_matrix(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![3 => Just(0.0), 2 => -1.0..1.0f64], n * n)
}

fn spd_from(n: usize, b: &[f64]) -> SparseMatrix {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
        }
    }
    SparseMatrix::from_dense(n, n, &m).unwrap()
}

fn box_complementary(l: f64, u: f64, x: f64, f: f64, tol: f64) -> bool {
    let interior_ok = f.abs() <= tol;
    let at_lower = (x - l).abs() <= tol && f >= -tol;
    let at_upper = (u - x).abs() <= tol && f <= tol;
    l - tol <= x && x <= u + tol && (interior_ok || at_lower || at_upper)
}

proptest! {
    #[test]
    fn fb_zero_iff_complementary(a in finite(), b in finite()) {
        let v = fb(a, b).abs();
        if a >= 0.0 && b >= 0.0 && a * b == 0.0 {
            prop_assert!(v <= 1e-12);
        }
        if v <= 1e-12 {
            prop_assert!(a >= -1e-12 && b >= -1e-12 && a.min(b) <= 1e-12);
        }
    }

    #[test]
    fn fb_is_symmetric(a in finite(), b in finite()) {
        prop_assert_eq!(fb(a, b), fb(b, a));
    }

    #[test]
    fn fb_partials_in_ball(a in finite(), b in finite()) {
        let (p, q) = fb_partials(a, b);
        prop_assert!((1.0 - p).powi(2) + (1.0 - q).powi(2) <= 1.0 + 1e-12);
        prop_assert!(p >= 0.0 && q >= 0.0);
    }

    #[test]
    fn boxed_phi_characterizes_solutions(
        l in -5.0..0.0f64, width in 0.1..5.0f64, t in 0.0..1.0f64, f in -3.0..3.0f64, regime in 0usize..5,
    ) {
        let u = l + width;
        let (x, f) = match regime {
            0 => (l, f.abs()),
            1 => (u, -f.abs()),
            2 => (l + t * width, 0.0),
            3 => (l, 0.0),
            _ => (l + t * width, f),
        };
        let phi = phi_component(l, u, x, f);
        if box_complementary(l, u, x, f, 0.0) {
            prop_assert!(phi.abs() <= 1e-10, "phi={phi} at l={l} u={u} x={x} f={f}");
        } else {
            prop_assert!(phi.abs() > 0.0);
        }
    }

    #[test]
    fn preconditioner_apply_is_linear(
        b in dense_matrix(6), r in prop::collection::vec(-1.0..1.0f64, 6), s in prop::collection::vec(-1.0..1.0f64, 6),
        alpha in -2.0..2.0f64, kind in 0usize..4,
    ) {
        let a = spd_from(6, &b);
        let kind = [PreconditionerKind::Identity, PreconditionerKind::Jacobi, PreconditionerKind::Ilu0,
                    PreconditionerKind::BlockJacobiIlu0(2)][kind];
        let m = Preconditioner::build(kind, &a).unwrap();
        let combo: Vec<f64> = r.iter().zip(&s).map(|(x, y)| alpha * x + y).collect();
        let lhs = m.apply(&combo);
        let (mr, ms) = (m.apply(&r), m.apply(&s));
        for i in 0..6 {
            prop_assert!((lhs[i] - (alpha * mr[i] + ms[i])).abs() <= 1e-12 * (1.0 + lhs[i].abs()));
        }
    }

    #[test]
    fn cg_agrees_with_lu(b in dense_matrix(8), rhs in prop::collection::vec(-1.0..1.0f64, 8)) {
        let a = spd_from(8, &b);
        let direct = dense_lu_solve(&a, &rhs).unwrap();
        let m = Preconditioner::build(PreconditionerKind::Ilu0, &a).unwrap();
        let (x, stats) = cg_solve(&a, &rhs, &m, 1e-12, 100).unwrap();
        prop_assert!(!stats.breakdown_flag);
        for (u, v) in x.iter().zip(&direct) {
            prop_assert!((u - v).abs() <= 1e-8);
        }
    }

    #[test]
    fn submatrix_matches_dense_slice(
        data in dense_matrix(7), mask_r in prop::collection::vec(any::<bool>(), 7), mask_c in prop::collection::vec(any::<bool>(), 7),
    ) {
        let a = SparseMatrix::from_dense(7, 7, &data).unwrap();
        let rows: Vec<usize> = (0..7).filter(|&i| mask_r[i]).collect();
        let cols: Vec<usize> = (0..7).filter(|&i| mask_c[i]).collect();
        let sub = a.extract_submatrix(&rows, &cols).unwrap().to_dense();
        let data = &data;
        let expected: Vec<f64> = rows.iter().flat_map(|&r| cols.iter().map(move |&c| data[r * 7 + c])).collect();
        prop_assert_eq!(sub, expected);
    }

    #[test]
    fn transpose_is_involution_and_adjoint(
        data in dense_matrix(5), x in prop::collection::vec(-1.0..1.0f64, 5), y in prop::collection::vec(-1.0..1.0f64, 5),
    ) {
        let a = SparseMatrix::from_dense(5, 5, &data).unwrap();
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        let ax = a.spmv(&x).unwrap();
        let aty = a.spmv_transpose(&y).unwrap();
        let l: f64 = ax.iter().zip(&y).map(|(p, q)| p * q).sum();
        let r: f64 = x.iter().zip(&aty).map(|(p, q)| p * q).sum();
        prop_assert!((l - r).abs() <= 1e-12);
    }

    #[test]
    fn projection_and_validation_are_idempotent(
        lo in prop::collection::vec(-2.0..0.0f64, 4), w in prop::collection::vec(0.1..3.0f64, 4),
        x in prop::collection::vec(-5.0..5.0f64, 4),
    ) {
        let up: Vec<f64> = lo.iter().zip(&w).map(|(a, b)| a + b).collect();
        let p = MCProblem::new("box", lo.clone(), up.clone(), |x| x.to_vec(), |x| Ok(SparseMatrix::identity(x.len()))).unwrap();
        let once = p.project(&x);
        prop_assert_eq!(p.project(&once), once.clone());
        let v = validate_start_point(&p, &x).unwrap();
        prop_assert_eq!(validate_start_point(&p, &v).unwrap(), v);
        for i in 0..4 {
            prop_assert!(lo[i] <= once[i] && once[i] <= up[i]);
        }
    }

    #[test]
    fn partition_is_db_threshold(db in prop::collection::vec(0.0..1.0f64, 1..12), eps in 0.0..1.0f64) {
        let n = db.len();
        let d = DiagonalPair { d_a: vec![0.5; n], d_b: db.clone() };
        let j = SparseMatrix::identity(n);
        let rule = active_epsilon(&vec![0.0; n], &j, Some(eps));
        let part: IndexPartition = partition_by_db(&d, rule);
        prop_assert_eq!(part.active.len() + part.inactive.len(), n);
        for &i in &part.active { prop_assert!(db[i] <= eps); }
        for &i in &part.inactive { prop_assert!(db[i] > eps); }
        for (k, &i) in part.inactive.iter().enumerate() { prop_assert_eq!(part.full_to_reduced[i], Some(k)); }
    }

    #[test]
    fn reduced_matrix_is_spd_for_spd_jacobian(
        b in dense_matrix(6), x in prop::collection::vec(-1.0..2.0f64, 6), v in prop::collection::vec(-1.0..1.0f64, 6),
    ) {
        let j = spd_from(6, &b);
        let jc = j.clone();
        let p = MCProblem::ncp("spd", 6, move |x: &[f64]| {
            let mut f = jc.spmv(x).unwrap();
            f.iter_mut().for_each(|v| *v -= 1.0);
            f
        }, move |_| Ok(SparseMatrix::identity(6))).unwrap();
        let xp = p.project(&x);
        let f = p.eval_f(&xp);
        let state = SemismoothState::at(&p, xp.clone(), f.clone(), &j, Some(0.05), 0).unwrap();
        let diag = subdiff_diagonals(&p, &xp, &f);
        prop_assert_eq!(&state.diag, &diag);
        if state.partition.inactive.is_empty() { return Ok(()); }
        let r = reduced_matrix(&state, &j).unwrap();
        prop_assert!(r.is_symmetric());
        let k = r.n_rows();
        let av = r.spmv(&v[..k]).unwrap();
        let quad: f64 = av.iter().zip(&v[..k]).map(|(a, b)| a * b).sum();
        let norm2: f64 = v[..k].iter().map(|a| a * a).sum();
        prop_assert!(quad >= 0.99 * norm2 - 1e-15);
    }
}
