use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lanpower_bench::{ar1_spec, arch_spec};
use lanpower_core::testing::linear_grid;
use lanpower_core::{bootstrap_bias, central_seq, power_study, simulate, PowerStudyConfig, StreamId};

fn bench_simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    for n in [100usize, 400, 1600] {
        group.bench_with_input(BenchmarkId::new("ar1", n), &n, |b, &n| {
            let spec = ar1_spec(n);
            b.iter(|| simulate(black_box(&spec), StreamId::new(7)).unwrap())
        });
    }
    group.finish();
}

fn bench_central_seq(c: &mut Criterion) {
    let mut group = c.benchmark_group("central_seq");
    for (name, spec) in [("ar1", ar1_spec(400)), ("arch", arch_spec(400))] {
        let sample = simulate(&spec, StreamId::new(3)).unwrap();
        group.bench_function(name, |b| b.iter(|| central_seq(black_box(&sample), 0.1, &spec).unwrap()));
    }
    group.finish();
}

fn bench_bootstrap(c: &mut Criterion) {
    let sample = simulate(&ar1_spec(400), StreamId::new(5)).unwrap();
    c.bench_function("bootstrap_bias_n400_b500", |b| {
        b.iter(|| bootstrap_bias(black_box(&sample), 500, StreamId::new(9)).unwrap())
    });
}

fn bench_power_study(c: &mut Criterion) {
    let cfg = PowerStudyConfig {
        amplitude_grid: linear_grid(0.0, 2.0, 5),
        n_list: vec![80],
        m: 200,
        ..PowerStudyConfig::paper_ar1()
    };
    let mut group = c.benchmark_group("power_study");
    group.sample_size(10);
    group.bench_function("ar1_small", |b| b.iter(|| power_study(black_box(&cfg)).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_simulate, bench_central_seq, bench_bootstrap, bench_power_study);
criterion_main!(benches);
