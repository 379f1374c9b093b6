use criterion::{black_box, criterion_group, criterion_main, Criterion};
use skewdiff_bench::uniform_samples;
use skewdiff_core::sbm::{expected_local_time, expected_local_time_closed_form, LocalTimeLaw};
use skewdiff_core::{gaussian_tail, ks_distance, EmpiricalCdf};

fn tails(c: &mut Criterion) {
    let xs = uniform_samples(1_000, 8.0);
    c.bench_function("gaussian_tail/1000", |b| {
        b.iter(|| xs.iter().map(|&x| gaussian_tail(black_box(x))).sum::<f64>())
    });
}

fn mean_local_time(c: &mut Criterion) {
    c.bench_function("expected_local_time/quadrature", |b| {
        b.iter(|| expected_local_time(black_box(0.7), black_box(1.3)).unwrap())
    });
    c.bench_function("expected_local_time/closed_form", |b| {
        b.iter(|| expected_local_time_closed_form(black_box(0.7), black_box(1.3)))
    });
}

fn ks(c: &mut Criterion) {
    let law = LocalTimeLaw::new(1.0, 1.0).unwrap();
    let samples = uniform_samples(100_000, 2.0);
    c.bench_function("ks_distance/100000", |b| {
        b.iter(|| ks_distance(&EmpiricalCdf::new(black_box(samples.clone())).unwrap(), &law))
    });
}

criterion_group!(benches, tails, mean_local_time, ks);
criterion_main!(benches);
