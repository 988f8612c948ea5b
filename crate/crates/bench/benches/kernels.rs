use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dyson_core::hilbert::{self, SampledFunction, UniformGrid};
use dyson_core::particle::{self, ParticleState, SimParams};
use dyson_core::spectral::{self, ComplexPoint};
use dyson_core::AtomicMeasure;

fn drift_and_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("particle");
    for n in [100usize, 1000] {
        let positions: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / n as f64).collect();
        group.bench_with_input(BenchmarkId::new("drift", n), &positions, |b, x| {
            b.iter(|| particle::drift(black_box(x)))
        });
        let params = SimParams {
            n_particles: n,
            beta: 2.0,
            dt: 1e-3,
            seed: 1,
            t_end: 1.0,
        };
        let state = ParticleState::new(positions.clone(), 0.5).unwrap();
        let noise = particle::step_noise(1, 0, n);
        group.bench_with_input(BenchmarkId::new("step", n), &state, |b, s| {
            b.iter(|| particle::step_dyson(black_box(s), &params, &noise).unwrap())
        });
    }
    group.finish();
}

fn green(c: &mut Criterion) {
    let mut group = c.benchmark_group("green");
    let three = AtomicMeasure::uniform(&[-1.0, 0.0, 1.0]).unwrap();
    let two = AtomicMeasure::two_source(1.0).unwrap();
    let z = ComplexPoint::upper(0.3, 0.2).unwrap();
    group.bench_function("functional_two_source", |b| {
        b.iter(|| spectral::green_functional(&two, 0.5, black_box(z)).unwrap())
    });
    group.bench_function("functional_three_atoms", |b| {
        b.iter(|| spectral::green_functional(&three, 0.5, black_box(z)).unwrap())
    });
    group.bench_function("functional_boundary", |b| {
        b.iter(|| spectral::green_functional(&three, 0.5, ComplexPoint::boundary(black_box(0.4))).unwrap())
    });
    group.bench_function("closed_form_two_source", |b| {
        b.iter(|| spectral::green_two_source(0.5, black_box(z), 1.0).unwrap())
    });
    group.finish();
}

fn hilbert_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("hilbert");
    for n in [1usize << 10, 1 << 13] {
        let grid = UniformGrid::new(-40.0, 40.0, n).unwrap();
        let f = SampledFunction::from_fn(grid, |x| (-x * x).exp()).unwrap();
        group.bench_with_input(BenchmarkId::new("spectral", n), &f, |b, f| {
            b.iter(|| hilbert::hilbert_spectral(black_box(f)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, drift_and_step, green, hilbert_transform);
criterion_main!(benches);
