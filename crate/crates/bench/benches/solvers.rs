use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pgmm_bench::solver_cases;
use pgmm_core::{solve, Method, SolverConfig};

fn pgmm_vs_spg(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for (label, inst) in solver_cases() {
        for method in Method::ALL {
            let cfg = SolverConfig::with_method(method);
            group.bench_function(BenchmarkId::new(method.as_str(), label), |b| {
                b.iter(|| {
                    black_box(solve(inst.objective.as_ref(), &inst.set, &inst.x0, &cfg).unwrap())
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, pgmm_vs_spg);
criterion_main!(benches);
