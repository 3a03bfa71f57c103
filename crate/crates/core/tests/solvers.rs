use compsolve::problems::*;
use compsolve::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn linear_solvers() -> Vec<LinearSolver> {
    vec![
        LinearSolver::lu(),
        LinearSolver::cg(PreconditionerKind::Ilu0),
        LinearSolver::cg(PreconditionerKind::Jacobi),
        LinearSolver::cg(PreconditionerKind::BlockJacobiIlu0(3)),
    ]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn generators() -> Vec<MCProblem> {
    let g = GridSpec::unit_square(12, 9).unwrap();
    let bp = BearingParams::new(0.7, 10.0).unwrap();
    vec![
        journal_bearing(&bp.grid(10, 11).unwrap(), &bp).unwrap(),
        obstacle(&g).unwrap(),
        torsion(&g, 5.0).unwrap(),
        combustion(&g, 5.0).unwrap(),
    ]
}

#[test]
fn generator_jacobians_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in generators() {
        for _ in 0..3 {
            let x: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let err = jacobian_fd_error(&p, &x).unwrap();
            assert!(err <= 1e-6, "{}: {err}", p.name());
        }
    }
}

#[test]
fn grid_jacobians_are_symmetric() {
    for p in generators() {
        let x = vec![0.3; p.dim()];
        assert!(p.eval_jacobian(&x).unwrap().is_symmetric(), "{}", p.name());
    }
}

#[test]
fn both_methods_match_oracle_on_random_lcps() {
    let cfg = SolverConfig::default();
    for seed in 0..10 {
        let n = 3 + (seed as usize % 6);
        let (m, q) = random_monotone_lcp(n, 100 + seed);
        let exact = lcp_brute_force(&m, &q).unwrap();
        let p = lcp_nonneg("r", &m, &q).unwrap();
        for method in [Method::Assm, Method::Rsls] {
            for lin in linear_solvers() {
                let s = method.solve(&p, &vec![0.0; n], &cfg, &lin).unwrap();
                assert_eq!(s.report.status, Status::Converged, "{method:?} {lin:?} seed {seed}");
                assert!(max_diff(&s.x, &exact) <= 1e-6, "{method:?} seed {seed}");
            }
        }
    }
}

#[test]
fn methods_agree_on_small_grids() {
    let cfg = SolverConfig::default();
    for p in generators() {
        let x0 = p.project(&vec![0.0; p.dim()]);
        let reference = Method::Rsls.solve(&p, &x0, &cfg, &LinearSolver::lu()).unwrap();
        assert!(reference.report.status.is_converged(), "{}", p.name());
        for method in [Method::Assm, Method::Rsls] {
            for lin in linear_solvers() {
                let s = method.solve(&p, &x0, &cfg, &lin).unwrap();
                assert!(
                    s.report.status.is_converged(),
                    "{} {method:?} {lin:?}: {:?}",
                    p.name(),
                    s.report.status
                );
                assert!(complementarity_error(&p, &s.x).unwrap() <= 1e-6);
                assert!(max_diff(&s.x, &reference.x) <= 1e-6, "{} {method:?}", p.name());
            }
        }
    }
}

#[test]
fn reduced_space_iterates_stay_feasible() {
    let cfg = SolverConfig::default();
    for p in generators() {
        let mut seen = 0;
        let x0 = vec![0.7; p.dim()];
        let lin = LinearSolver::cg(PreconditionerKind::Ilu0);
        solve_reduced_space_observed(&p, &x0, &cfg, &lin, &mut |x| {
            seen += 1;
            assert_eq!(p.project(x), x.to_vec());
        })
        .unwrap();
        assert!(seen >= 2);
    }
}

#[test]
fn histories_decrease_and_respect_budget() {
    let cfg = SolverConfig {
        max_linear_solves: 7,
        ..SolverConfig::default()
    };
    for p in generators() {
        let x0 = p.project(&vec![0.0; p.dim()]);
        for method in [Method::Assm, Method::Rsls] {
            let s = method
                .solve(&p, &x0, &cfg, &LinearSolver::cg(PreconditionerKind::Ilu0))
                .unwrap();
            let r = &s.report;
            assert!(r.linear_solves <= 7);
            let mut prev = r.initial_residual;
            for rec in &r.history {
                assert!(rec.residual_norm < prev);
                prev = rec.residual_norm;
            }
            assert_eq!(r.outer_iterations, r.history.len());
        }
    }
}

#[test]
fn suite_is_solved_by_semismooth_with_lu() {
    let cfg = SolverConfig::default();
    let suite = small_suite().unwrap();
    let solved = suite
        .iter()
        .filter(|inst| {
            let s = Method::Assm
                .solve(&inst.problem, &inst.x0, &cfg, &LinearSolver::lu())
                .unwrap();
            s.report.status.is_converged() && inst.certifies(&s.x)
        })
        .count();
    assert!(solved as f64 >= 0.9 * suite.len() as f64, "{solved}/{}", suite.len());
}

#[test]
fn nonmonotone_lcp_lands_on_a_certified_solution() {
    let suite = small_suite().unwrap();
    let inst = suite.iter().find(|s| s.name() == "nonmonotone_lcp4").unwrap();
    for method in [Method::Assm, Method::Rsls] {
        let s = method
            .solve(&inst.problem, &inst.x0, &SolverConfig::default(), &LinearSolver::lu())
            .unwrap();
        assert!(inst.distance_to_known(&s.x).unwrap() <= 1e-6);
    }
}

#[test]
fn report_round_trips_through_json() {
    let p = obstacle(&GridSpec::unit_square(5, 5).unwrap()).unwrap();
    let x0 = p.project(&[0.0; 25]);
    let s = Method::Assm
        .solve(&p, &x0, &SolverConfig::default(), &LinearSolver::lu())
        .unwrap();
    let text = serde_json::to_string(&s.report).unwrap();
    let back: SolverReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s.report);
}
