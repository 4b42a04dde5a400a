//! Timings of the main stages: Fredholm determinants, the coupled Painlevé
//! integration, coefficient extraction and the Laguerre sampler.

use besselgap::apps::count_distribution;
use besselgap::lue::sample_smallest;
use besselgap::{generating_fn, genfn_painleve, hankel_ratio, integrate_with, PainleveConfig};
use besselgap_bench::spread;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn fredholm(c: &mut Criterion) {
    let mut g = c.benchmark_group("fredholm_genfn");
    for k in [1usize, 2, 4] {
        let p = spread(k, 2.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(k), &p, |b, p| {
            b.iter(|| generating_fn(black_box(p), 16, 1e-12).unwrap())
        });
    }
    g.finish();
}

fn painleve(c: &mut Criterion) {
    let mut g = c.benchmark_group("painleve_integrate");
    let cfg = PainleveConfig::default();
    for k in [1usize, 2, 4] {
        let p = spread(k, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(k), &p, |b, p| {
            b.iter(|| {
                let traj = integrate_with(black_box(p), 4.0, &cfg).unwrap();
                genfn_painleve(&traj, 4.0).unwrap()
            })
        });
    }
    g.finish();
}

fn extraction(c: &mut Criterion) {
    c.bench_function("count_distribution_n32", |b| {
        b.iter(|| count_distribution(0.5, black_box(4.0), 32, 1e-12).unwrap())
    });
}

fn laguerre(c: &mut Criterion) {
    c.bench_function("hankel_ratio_n8", |b| {
        b.iter(|| hankel_ratio(8, 0.5, black_box(&[1.0, 5.0]), &[0.3, 0.6]).unwrap())
    });
    let mut g = c.benchmark_group("sample_smallest");
    for n in [100usize, 1000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                sample_smallest(n, 0.0, seed, 2).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, fredholm, painleve, extraction, laguerre);
criterion_main!(benches);
