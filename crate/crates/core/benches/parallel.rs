use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ssc_core::{equivalence_sweep, parse_pattern, Execution, MonteCarlo, StructuredSystem};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn circuit() -> StructuredSystem {
    StructuredSystem::new(
        parse_pattern("* 0 *\n0 0 *\n? * *").unwrap(),
        parse_pattern("* 0\n0 *\n? 0").unwrap(),
    )
    .unwrap()
}

fn bench_monte_carlo(c: &mut Criterion) {
    let sys = circuit();
    let mut group = c.benchmark_group("monte_carlo_500");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            let mc = MonteCarlo::new(500, 7).execution(exec);
            b.iter(|| black_box(mc.run(&sys, true).unwrap()))
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("equivalence_sweep_3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(equivalence_sweep(3, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_monte_carlo, bench_sweep);
criterion_main!(benches);
