//! Benchmarks for the hot paths: exact pattern search, hard-instance
//! construction, profile counting, and full sampler runs.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use monoseq_core::*;

fn bench_exact_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_pattern_exact");
    for e in [10u32, 14] {
        let n = 1usize << e;
        let mut rng = RandomStream::new(1);
        let f = free_runs(n, 4, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::new("free_k4", n), &f, |b, f| {
            b.iter(|| find_pattern_exact(black_box(f), 4).unwrap())
        });
        let g = spike_comb(n, 8).unwrap();
        group.bench_with_input(BenchmarkId::new("spikes_k4", n), &g, |b, g| {
            b.iter(|| find_pattern_exact(black_box(g), 4).unwrap())
        });
    }
    group.finish();
}

fn bench_hard_instances(c: &mut Criterion) {
    let mut group = c.benchmark_group("hardness");
    for e in [10u32, 14] {
        let n = 1usize << e;
        group.bench_with_input(BenchmarkId::new("construct_k4", n), &n, |b, &n| {
            b.iter(|| {
                let mut rng = RandomStream::new(7);
                hard_with_certificate(black_box(n), 4, &mut rng).unwrap()
            })
        });
    }
    let n = 1 << 10;
    let mut rng = RandomStream::new(3);
    use rand::Rng;
    let q: std::collections::BTreeSet<usize> = (0..64).map(|_| rng.random_range(0..n)).collect();
    group.bench_function("bin_prof_h2", |b| {
        b.iter(|| bin_prof(black_box(&q), 2, n).unwrap())
    });
    group.bench_function("bin_prof_brute_h2", |b| {
        b.iter(|| bin_prof_brute(black_box(&q), 2, n).unwrap())
    });
    group.finish();
}

fn bench_sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    group.sample_size(20);
    for (k, eps) in [(2usize, 0.25f64), (4, 0.125)] {
        let n = 1usize << 12;
        let mut gen = RandomStream::new(11);
        let hi = hard_with_certificate(n, k, &mut gen).unwrap();
        let cfg = TesterConfig::new(k, eps).unwrap();
        group.bench_function(format!("hard_n4096_k{k}"), |b| {
            b.iter(|| {
                let mut rng = RandomStream::new(5);
                let mut oracle = QueryOracle::new(&hi.seq);
                sampler(&mut oracle, &cfg, &mut rng).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_exact_search,
    bench_hard_instances,
    bench_sampler
);
criterion_main!(benches);
