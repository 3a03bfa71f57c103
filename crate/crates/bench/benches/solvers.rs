use compsolve::linalg::{cg_solve, Preconditioner, PreconditionerKind};
use compsolve::{LinearSolver, Method, SolverConfig};
use compsolve_bench::{bearing, bearing_system};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn spmv(c: &mut Criterion) {
    let (a, b) = bearing_system(100);
    let mut y = vec![0.0; a.n_rows()];
    c.bench_function("spmv_bearing_100x100", |bench| {
        bench.iter(|| a.spmv_into(black_box(&b), &mut y))
    });
}

fn preconditioned_cg(c: &mut Criterion) {
    let (a, b) = bearing_system(60);
    let mut group = c.benchmark_group("cg_bearing_60x60");
    for kind in [
        PreconditionerKind::Identity,
        PreconditionerKind::Jacobi,
        PreconditionerKind::Ilu0,
        PreconditionerKind::BlockJacobiIlu0(4),
    ] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{kind:?}")),
            &kind,
            |bench, &kind| {
                bench.iter(|| {
                    let m = Preconditioner::build(kind, &a).unwrap();
                    cg_solve(&a, black_box(&b), &m, 1e-2, a.n_rows()).unwrap()
                })
            },
        );
    }
    group.finish();
}

fn full_solves(c: &mut Criterion) {
    let (problem, x0) = bearing(40);
    let cfg = SolverConfig::default();
    let linear = LinearSolver::cg(PreconditionerKind::Ilu0);
    let mut group = c.benchmark_group("solve_bearing_40x40");
    group.sample_size(20);
    for method in [Method::Assm, Method::Rsls] {
        group.bench_function(method.as_str(), |bench| {
            bench.iter(|| method.solve(&problem, black_box(&x0), &cfg, &linear).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spmv, preconditioned_cg, full_solves);
criterion_main!(benches);
