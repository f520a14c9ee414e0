use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use bvquad::{kernel_sup_norm, kronrod_rule, WeightSpec};
use bvquad_bench::{compound_simpson, legendre_gauss};

fn construction(c: &mut Criterion) {
    let legendre = WeightSpec::legendre();
    let mut group = c.benchmark_group("construct");
    for n in [16usize, 128, 1024] {
        group.bench_with_input(BenchmarkId::new("gauss", n), &n, |b, &n| {
            b.iter(|| legendre_gauss(black_box(n)))
        });
        group.bench_with_input(BenchmarkId::new("kronrod", n), &n, |b, &n| {
            b.iter(|| kronrod_rule(&legendre, black_box(n)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("clenshaw_curtis", n), &n, |b, &n| {
            b.iter(|| bvquad::clenshaw_curtis(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_sup_norm");
    group.sample_size(10);
    for n in [8usize, 32, 128] {
        let rule = legendre_gauss(n);
        group.bench_with_input(BenchmarkId::new("gauss_s2", n), &rule, |b, rule| {
            b.iter(|| kernel_sup_norm(rule, 2).unwrap())
        });
        let rule = compound_simpson(n);
        group.bench_with_input(BenchmarkId::new("compound_simpson_s3", n), &rule, |b, rule| {
            b.iter(|| kernel_sup_norm(rule, 3).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, construction, kernels);
criterion_main!(benches);
