use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rotstate_core::dense::theta_from_trace;
use rotstate_core::invariant::{theta_matrix_uncached, werner_alpha};
use rotstate_core::separability::{classify, cross_norm, negativity_trace_norm};
use rotstate_core::wigner::six_j;
use rotstate_core::HalfInt;

fn bench_six_j(c: &mut Criterion) {
    let mut g = c.benchmark_group("six_j");
    for twice_j in [3, 9, 19] {
        let j = HalfInt::from_twice(twice_j);
        let big = HalfInt::integer(twice_j / 2);
        let small = HalfInt::integer(1);
        g.bench_with_input(BenchmarkId::from_parameter(twice_j), &j, |b, &j| {
            b.iter(|| six_j(black_box(j), j, big, j, j, small))
        });
    }
    g.finish();
}

fn bench_theta(c: &mut Criterion) {
    let mut g = c.benchmark_group("theta_matrix");
    for n in [4, 8, 12] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| theta_matrix_uncached(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn bench_dense(c: &mut Criterion) {
    let mut g = c.benchmark_group("theta_from_trace");
    g.sample_size(10);
    for n in [3, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| theta_from_trace(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn bench_criteria(c: &mut Criterion) {
    let alpha = werner_alpha(6, 0.3).unwrap();
    c.bench_function("classify_n6", |b| b.iter(|| classify(black_box(&alpha))));
    c.bench_function("negativity_n6", |b| b.iter(|| negativity_trace_norm(black_box(&alpha))));
    c.bench_function("cross_norm_n6", |b| b.iter(|| cross_norm(black_box(&alpha))));
}

criterion_group!(benches, bench_six_j, bench_theta, bench_dense, bench_criteria);
criterion_main!(benches);
