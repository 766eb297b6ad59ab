use criterion::{criterion_group, criterion_main, Criterion};
use holdup_econometrics::{run_monte_carlo, Execution, MonteCarloConfig};

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    for execution in [Execution::Sequential, Execution::Parallel] {
        let cfg = MonteCarloConfig {
            replications: 16,
            execution,
            ..MonteCarloConfig::default()
        };
        group.bench_function(format!("{execution:?}").to_lowercase(), |b| {
            b.iter(|| run_monte_carlo(&cfg).expect("monte carlo"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
