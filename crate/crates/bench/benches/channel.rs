use criterion::{criterion_group, criterion_main, Criterion};
use lctcap::channel::{estimate_achievable_rate, SimConfig};
use lctcap::matrix::MatrixKind;
use std::hint::black_box;

fn simulation(c: &mut Criterion) {
    let cfg = SimConfig::new(MatrixKind::Theorem1 { b: 0.5, d: 2.0 }, 1.0, 1.0, 0.1, 8.0, lctcap::channel::MIN_TRIALS, 1);
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("theorem1_min_trials", |b| b.iter(|| estimate_achievable_rate(black_box(&cfg)).unwrap()));
    g.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
