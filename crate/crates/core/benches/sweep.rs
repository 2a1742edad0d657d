use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cngate::evolve::{EvolutionConfig, Method};
use cngate::sweep::{run_sweep, Execution, RunConfig, SweepSpec, SweepVariable};
use cngate::InitialState;

fn spec(points: usize) -> SweepSpec {
    let base = RunConfig {
        initial: InitialState::SuperpositionDressed,
        evolution: EvolutionConfig::new(0.01, Method::Rk4, 0).unwrap(),
        ..RunConfig::default()
    };
    let values = (1..=points)
        .map(|k| 100.0 * k as f64 / points as f64)
        .collect();
    SweepSpec::new(SweepVariable::M, values, base).unwrap()
}

fn sweep_execution(c: &mut Criterion) {
    let mut group = c.benchmark_group("m_sweep");
    group.sample_size(10);
    for points in [4, 20] {
        let s = spec(points);
        for (name, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, points), &s, |b, s| {
                b.iter(|| run_sweep(black_box(s), exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep_execution);
criterion_main!(benches);
