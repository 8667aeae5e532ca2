//! Sequential versus rayon execution of the two data-parallel workloads:
//! the moduli-plane scan and a batch of Lie closures.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phimod::module::build_family;
use phimod::monodromy::monodromy_lie;
use phimod::sampling::{rng_for, sample_mu};
use phimod::scan::{scan, ScanConfig};
use phimod::{Execution, PrimeContext};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_scan(c: &mut Criterion) {
    let ctx = PrimeContext::rational(7).unwrap();
    let cfg = ScanConfig { eps: 0, height: 3, seed: 1 };
    let mut group = c.benchmark_group("scan_h3");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| scan(&ctx, &cfg, exec).unwrap()));
    }
    group.finish();
}

fn bench_lie_batch(c: &mut Criterion) {
    let ctx = PrimeContext::rational(7).unwrap();
    let modules: Vec<_> = (0..32).map(|i| build_family(&sample_mu(&mut rng_for(3, i), 1, 7), &ctx).unwrap()).collect();
    let mut group = c.benchmark_group("lie_closure_batch32");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| exec.map(&modules, |d| monodromy_lie(d, Execution::Sequential).unwrap().dim()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_lie_batch);
criterion_main!(benches);
