use criterion::{black_box, criterion_group, criterion_main, Criterion};

use grushin_core::harmonics::{build_basis, kernel_diag_sup, kernel_g};
use grushin_core::quadrature::{gauss_jacobi_rule, OmegaPoint};
use grushin_core::GrushinConfig;

fn bench_basis_build(c: &mut Criterion) {
    let cfg = GrushinConfig::new(3, 2, 2);
    c.bench_function("build_basis (3,2,2) k=12", |b| {
        b.iter(|| build_basis(black_box(cfg), black_box(12)).unwrap())
    });
}

fn bench_quadrature_rule(c: &mut Criterion) {
    c.bench_function("gauss_jacobi_rule 64 nodes (uncached)", |b| {
        let mut a = 0.0f64;
        b.iter(|| {
            // distinct parameters defeat the rule cache
            a += 1e-9;
            gauss_jacobi_rule(black_box(0.75 + a), black_box(1.25), 64).unwrap()
        })
    });
}

fn bench_kernel(c: &mut Criterion) {
    let cfg = GrushinConfig::new(2, 2, 1);
    let p1 = OmegaPoint {
        phi: 0.7,
        omega1: vec![0.6, 0.8],
        omega2: vec![1.0, 0.0],
    };
    let p2 = OmegaPoint {
        phi: 1.1,
        omega1: vec![0.0, 1.0],
        omega2: vec![0.28, 0.96],
    };
    c.bench_function("kernel_g (2,2,1) k=20", |b| {
        b.iter(|| kernel_g(black_box(cfg), 20, &p1, &p2).unwrap())
    });
    c.bench_function("kernel_diag_sup (2,2,1) k=24 grid=200", |b| {
        b.iter(|| kernel_diag_sup(black_box(cfg), 24, 200).unwrap())
    });
}

criterion_group!(benches, bench_basis_build, bench_quadrature_rule, bench_kernel);
criterion_main!(benches);
