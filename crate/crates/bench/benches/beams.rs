use std::hint::black_box;

use asibeam::asi::{expand_ura, ExpansionOrder};
use asibeam::design::{default_target, reference_dpbf, synthesize_dpbf, ArrayConfig, InitialGuess};
use asibeam::netsim::{attach_and_run, DeploymentConfig, NamedBeam};
use asibeam::patterns::{array_factor_total, sphere_grid, total_pattern};
use asibeam::synthesis::{normalize_power, OptimizerConfig};
use asibeam::DualPolWeightsMat;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn expansion(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand_ura");
    let single = DualPolWeightsMat::single_element();
    for k in [3u32, 5, 7] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| expand_ura(black_box(&single), k, k, ExpansionOrder::RowsFirst))
        });
    }
    group.finish();
}

fn patterns(c: &mut Criterion) {
    let cfg = ArrayConfig::default();
    let g = cfg.geometry().unwrap();
    let w = reference_dpbf(&cfg, &default_target()).unwrap();
    let grid = sphere_grid(2.0).unwrap();
    c.bench_function("array_factor_total 8x8 sphere 2deg", |b| {
        b.iter(|| array_factor_total(black_box(&w), &g, &grid).unwrap())
    });
    c.bench_function("total_pattern 8x8 sphere 2deg", |b| {
        b.iter(|| total_pattern(black_box(&w), &g, &cfg.element, &grid).unwrap())
    });
}

fn synthesis(c: &mut Criterion) {
    let cfg = ArrayConfig::default();
    let opt = OptimizerConfig {
        seed: 1,
        iterations: 20,
        population: 16,
    };
    let mut group = c.benchmark_group("synthesis");
    group.sample_size(10);
    group.bench_function("dpbf 20 generations", |b| {
        b.iter(|| synthesize_dpbf(&cfg, &default_target(), &opt, InitialGuess::Random).unwrap())
    });
    group.finish();
}

fn network(c: &mut Criterion) {
    let array = ArrayConfig::default();
    let deployment = DeploymentConfig {
        ues_per_cell: 20,
        ..DeploymentConfig::default()
    };
    let beams = [NamedBeam {
        name: "dpbf".into(),
        weights: normalize_power(
            &reference_dpbf(&array, &default_target()).unwrap(),
            deployment.bs_power_dbm,
        ),
        geometry: array.geometry().unwrap(),
        element: array.element,
    }];
    let mut group = c.benchmark_group("netsim");
    group.sample_size(10);
    group.bench_function("27 cells x 20 UEs", |b| {
        b.iter(|| attach_and_run(&deployment, &array.element, black_box(&beams)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, expansion, patterns, synthesis, network);
criterion_main!(benches);
