use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfi_core::gibbs::{mixture_density_series_on, truncation_for_tail, DEFAULT_TAIL_TOLERANCE};
use mfi_core::grid::default_grid_for;
use mfi_core::superposition::{figure1_scan_with, superpose, SuperpositionSpec};
use mfi_core::transactional::{ordering_report_with, CommonScale, StrategyKind, SuperpositionMode};
use mfi_core::{Execution, FisherImage, GridFunction, OscillatorParams};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn eigenstate_sampling(c: &mut Criterion) {
    let params = OscillatorParams::standard();
    let grid = default_grid_for(&params, 40);
    let mut group = c.benchmark_group("eigenstate_n40_4096");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| GridFunction::eigenstate_with(exec, grid, black_box(40), &params)));
    }
    group.finish();
}

fn figure1(c: &mut Criterion) {
    let mut group = c.benchmark_group("figure1_scan");
    for count in [10_001, 100_001] {
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, count), &count, |b, &n| {
                b.iter(|| figure1_scan_with(exec, 1.0, n).unwrap())
            });
        }
    }
    group.finish();
}

fn gibbs_series(c: &mut Criterion) {
    let params = OscillatorParams::standard();
    let mut group = c.benchmark_group("gibbs_series_4096");
    for d in [0.5, 2.0] {
        let n = truncation_for_tail(d, DEFAULT_TAIL_TOLERANCE);
        let grid = default_grid_for(&params, 8);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, &d| {
                b.iter(|| mixture_density_series_on(exec, d, &params, n, grid))
            });
        }
    }
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let params = OscillatorParams::standard();
    let spec = SuperpositionSpec::new(0.4, 0.3, 10, 30, params).unwrap();
    let state = superpose(&spec).unwrap();
    let grid = default_grid_for(&params, 30);
    let mut group = c.benchmark_group("superposition_synthesis_4096");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| state.synthesize_with(exec, grid)));
    }
    group.finish();
}

fn ordering(c: &mut Criterion) {
    let set: Vec<StrategyKind> = (0..600)
        .map(|i| match i % 3 {
            0 => StrategyKind::Eigenstate { n: i % 20 },
            1 => StrategyKind::Superposition { p: 0.5, alpha: 0.0, k_low: i % 7, k_high: i % 7 + 2 },
            _ => StrategyKind::Gibbs { d: 0.1 + 0.01 * i as f64 },
        })
        .collect();
    let scale = CommonScale { mu: Some(1.0), risk: None };
    let mut group = c.benchmark_group("ordering_own_minimizer_600");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| ordering_report_with(exec, &set, FisherImage::Physical, scale, SuperpositionMode::OwnMinimizer).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eigenstate_sampling, figure1, gibbs_series, synthesis, ordering);
criterion_main!(benches);
