use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use proplattice::algebra::{close, AlgebraBasis};
use proplattice::logic::{lattice_report, meet, meet_iterative, meet_nullspace, random_projector};
use proplattice::scenarios::{build_classical, build_weyl_finite};
use proplattice::Tolerance;

fn meet_routes(c: &mut Criterion) {
    let tol = Tolerance::default();
    let full = AlgebraBasis::full(6);
    let (p, q) = (random_projector(&full, 1, &tol), random_projector(&full, 2, &tol));
    let mut group = c.benchmark_group("meet_m6");
    group.bench_function("nullspace", |b| b.iter(|| meet_nullspace(black_box(&p), &q, &tol).unwrap()));
    group.bench_function("iterative", |b| b.iter(|| meet_iterative(black_box(&p), &q, &tol).unwrap()));
    group.bench_function("checked", |b| b.iter(|| meet(black_box(&p), &q, &tol).unwrap()));
    group.finish();
}

fn reports(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("lattice_report_100");
    group.sample_size(10);
    let algebras = [
        ("classical_8", close(&build_classical(8).unwrap(), &tol).unwrap()),
        ("weyl_3", close(&build_weyl_finite(3).unwrap(), &tol).unwrap()),
    ];
    for (name, alg) in &algebras {
        group.bench_with_input(BenchmarkId::from_parameter(name), alg, |b, alg| {
            b.iter(|| lattice_report(black_box(alg), 100, 7, &tol).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, meet_routes, reports);
criterion_main!(benches);
