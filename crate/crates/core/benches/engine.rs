use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use da_denom_core::catalog;
use da_denom_core::certify::{derive_delta_nu, verify_divisibility_with};
use da_denom_core::experiments::run_nonsplit_experiment;
use da_denom_core::propcheck::{check_grid, Grid, GridOptions};
use da_denom_core::recurrence::evaluate_fast;
use da_denom_core::valuation::primes_upto;
use da_denom_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn divisibility(c: &mut Criterion) {
    let spec = catalog::by_name("weierstrass(4, 0)").unwrap().spec;
    let cert = derive_delta_nu(&spec).unwrap();
    let f = evaluate_fast(&spec, 100).unwrap();
    let mut g = c.benchmark_group("verify_divisibility n<=100");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| verify_divisibility_with(&f, &cert, 0..=100, exec))
        });
    }
    g.finish();
}

fn grid(c: &mut Criterion) {
    let grid: Grid = "n=1..8".parse().unwrap();
    let primes = primes_upto(13);
    let mut g = c.benchmark_group("check_grid n<=8");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = GridOptions {
            exec,
            ..GridOptions::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_grid(&grid, &primes, &opts).unwrap())
        });
    }
    g.finish();
}

fn nonsplit(c: &mut Criterion) {
    let mut g = c.benchmark_group("nonsplit experiment n=200");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_nonsplit_experiment(200, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, divisibility, grid, nonsplit);
criterion_main!(benches);
