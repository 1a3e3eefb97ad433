use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use symbreak_core::bcs::{ab_critical_current, bcs_overlap, BcsModel, JunctionModel};
use symbreak_core::fluctuation::{mean_and_variance, LocalOperatorSum, ProductState, Support, Term};
use symbreak_core::fock::{phase_state, smeared_density_variance};
use symbreak_core::measurement::{Detector, InitialState, MIN_POINTS_PER_FRINGE};
use symbreak_core::modes::eval_pair;
use symbreak_core::{ModeModel, C64};

fn detection(c: &mut Criterion) {
    let model = ModeModel::ring_with_windings(3, 10.0).unwrap();
    let detector = Detector::new(&model, 0.0, MIN_POINTS_PER_FRINGE).unwrap();
    let mut g = c.benchmark_group("detection_run");
    g.sample_size(20);
    for n in [50usize, 500] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| detector.run(n, 2 * n, InitialState::Number, black_box(7)).unwrap())
        });
    }
    g.finish();
}

fn critical_current(c: &mut Criterion) {
    let mut g = c.benchmark_group("ab_double_sum");
    g.sample_size(10);
    for m in [500usize, 2000] {
        let j = JunctionModel::symmetric(BcsModel::uniform(m, 50.0, 1.0).unwrap(), 1e-4).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &j, |b, j| b.iter(|| ab_critical_current(j).unwrap()));
    }
    g.finish();
}

fn fock_variance(c: &mut Criterion) {
    let model = ModeModel::ring_with_windings(3, 10.0).unwrap();
    let (pa, pb) = eval_pair(&model, 1.1, 0.0).unwrap();
    let mut g = c.benchmark_group("smeared_variance");
    for n in [100usize, 10_000] {
        let s = phase_state(n, 0.3).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| smeared_density_variance(pa, pb, black_box(0.01), s).unwrap())
        });
    }
    g.finish();
}

fn product_state_variance(c: &mut Criterion) {
    let n = 4096;
    let state = ProductState::uniform(vec![C64::new(0.8, 0.0), C64::new(0.0, 0.6)], n).unwrap();
    let z = C64::new(0.0, 0.0);
    let hop = vec![z, z, z, z, z, z, C64::new(1.0, 0.0), z, z, C64::new(1.0, 0.0), z, z, z, z, z, z];
    let op =
        LocalOperatorSum::new((0..n - 1).map(|i| Term::new(Support::Two(i, i + 1), hop.clone()).unwrap()).collect());
    c.bench_function("product_state_variance/4096", |b| b.iter(|| mean_and_variance(&op, &state).unwrap()));
}

fn bcs_overlap_log_sum(c: &mut Criterion) {
    let lead = BcsModel::uniform(100_000, 50.0, 1.0).unwrap();
    c.bench_function("bcs_overlap/100000", |b| b.iter(|| bcs_overlap(&lead, black_box(0.7))));
}

criterion_group!(benches, detection, critical_current, fock_variance, product_state_variance, bcs_overlap_log_sum);
criterion_main!(benches);
