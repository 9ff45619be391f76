//! Sequential versus rayon-parallel execution of the batch workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use betashift::cylinder::{cylinders, partition_oracle};
use betashift::exec::{self, ExecMode};
use betashift::language::enumerate_words_capped;
use betashift::verify::{verify_suite, VerifyOptions};
use betashift::Beta;

const TRIBONACCI: &str = "poly:-1,-1,-1,1@[1/1,2/1]";

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut m = vec![("sequential", ExecMode::Sequential)];
    if cfg!(feature = "parallel") {
        m.push(("parallel", ExecMode::Parallel));
    }
    m
}

fn bench_language(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_words");
    for (name, mode) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 14), &14usize, |b, &n| {
            exec::set_mode(mode);
            let beta = Beta::parse(TRIBONACCI).unwrap();
            b.iter(|| enumerate_words_capped(&beta, n, 16).unwrap().count)
        });
    }
    g.finish();
}

fn bench_cylinders(c: &mut Criterion) {
    let mut g = c.benchmark_group("cylinders");
    g.sample_size(10);
    for (name, mode) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 9), &9usize, |b, &n| {
            exec::set_mode(mode);
            let beta = Beta::parse(TRIBONACCI).unwrap();
            b.iter(|| {
                let cyl = cylinders(&beta, n, 16).unwrap().len();
                let part = partition_oracle(&beta, n, 16).unwrap().len();
                cyl + part
            })
        });
    }
    g.finish();
}

fn bench_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_suite");
    g.sample_size(10);
    let specs: Vec<String> = ["dec:2", "dec:3", "poly:-1,-1,1@[1/1,2/1]", TRIBONACCI]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut opts = VerifyOptions::default();
    opts.config.oracle_n = 6;
    opts.config.bounds_n = 7;
    opts.config.search_cap = 100;
    opts.config.r = 4;
    for (name, mode) in modes() {
        g.bench_function(name, |b| {
            exec::set_mode(mode);
            b.iter(|| verify_suite(&specs, &opts).passed)
        });
    }
    g.finish();
}

criterion_group!(benches, bench_language, bench_cylinders, bench_verify);
criterion_main!(benches);
