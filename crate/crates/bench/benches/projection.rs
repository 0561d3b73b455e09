use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use owlball::{project_ball, solve_root, RootfindParams, SsnParams};
use owlball_bench::fixture;

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("ball");
    group.sample_size(20);
    for n in [10_000, 100_000] {
        for beta in [1e-2, 0.5] {
            let inst = fixture(n, beta, 1.0, 0);
            let label = format!("n={n}/beta={beta}");
            group.throughput(Throughput::Elements(n as u64));
            group.bench_with_input(BenchmarkId::new("ssn", &label), &inst, |b, inst| {
                b.iter(|| project_ball(inst, &SsnParams::default()).unwrap())
            });
            group.bench_with_input(BenchmarkId::new("rootfind", &label), &inst, |b, inst| {
                b.iter(|| solve_root(inst, &RootfindParams::default()).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
