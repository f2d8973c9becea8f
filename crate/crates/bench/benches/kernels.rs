use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fiedcmg::seed::gaussian_vector;
use fiedcmg::{build_laplacian, galerkin_coarsen, generators, hec_coarsen};

fn spmv(c: &mut Criterion) {
    let mut group = c.benchmark_group("spmv");
    for side in [64, 256, 512] {
        let l = build_laplacian(&generators::grid(side, side).unwrap());
        let x = gaussian_vector(l.n(), 1);
        let mut y = vec![0.0; l.n()];
        group.bench_with_input(BenchmarkId::from_parameter(side), &side, |b, _| {
            b.iter(|| l.spmv_into(black_box(&x), &mut y).unwrap())
        });
    }
    group.finish();
}

fn coarsening(c: &mut Criterion) {
    let mut group = c.benchmark_group("coarsen");
    for side in [128, 512] {
        let l = build_laplacian(&generators::grid(side, side).unwrap());
        group.bench_with_input(BenchmarkId::new("hec", side), &side, |b, _| {
            b.iter(|| hec_coarsen(black_box(&l), 7).unwrap())
        });
        let map = hec_coarsen(&l, 7).unwrap();
        group.bench_with_input(BenchmarkId::new("galerkin", side), &side, |b, _| {
            b.iter(|| galerkin_coarsen(black_box(&l), &map).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spmv, coarsening);
criterion_main!(benches);
