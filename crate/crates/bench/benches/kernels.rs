use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multipure::analysis::{find_threshold, StateFamily};
use multipure::dense::{embed_diagonal, step_density};
use multipure::protocols::{p1_map, p2_map, TransitionTensor};
use multipure::{DiagonalState, Schedule, Step};

fn fast_maps(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast_maps");
    for n in [3usize, 6, 10] {
        let state = DiagonalState::werner_with_fidelity(n, 0.7).unwrap();
        group.bench_with_input(BenchmarkId::new("p2", n), &state, |b, s| {
            b.iter(|| p2_map(black_box(s)).unwrap())
        });
        if n <= 6 {
            // Warm the cached engine outside the timed loop.
            p1_map(&state).unwrap();
            group.bench_with_input(BenchmarkId::new("p1", n), &state, |b, s| {
                b.iter(|| p1_map(black_box(s)).unwrap())
            });
        }
    }
    group.finish();
}

fn dense_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_step");
    group.sample_size(10);
    for n in [2usize, 3, 4] {
        let rho = embed_diagonal(&DiagonalState::werner_with_fidelity(n, 0.7).unwrap());
        for step in [Step::P1, Step::P2] {
            group.bench_with_input(BenchmarkId::new(step.to_string(), n), &rho, |b, r| {
                b.iter(|| step_density(black_box(r), step).unwrap())
            });
        }
    }
    group.finish();
}

fn tensor_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("tensor_build");
    group.sample_size(10);
    for n in [3usize, 4, 5] {
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| TransitionTensor::build(black_box(n), Step::P1).unwrap())
        });
    }
    group.finish();
}

fn threshold(c: &mut Criterion) {
    let mut group = c.benchmark_group("threshold");
    group.sample_size(10);
    for n in [2usize, 3, 4] {
        group.bench_function(BenchmarkId::new("werner_p1p2", n), |b| {
            b.iter(|| {
                find_threshold(&StateFamily::Werner, n, &Schedule::alternating(), 1e-4).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, fast_maps, dense_step, tensor_build, threshold);
criterion_main!(benches);
