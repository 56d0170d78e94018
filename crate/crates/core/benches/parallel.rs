//! Parallel vs. sequential throughput on the data-parallel hot spots:
//! the interval tree at depth 14, a CDF grid sweep, and a batch of
//! independent Monte Carlo orbits.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use luroth::exec::{map_indexed, map_indexed_seq};
use luroth::{cdf, empirical_cdf, interval, unit_grid, Partition, SignSpec, Word};

fn bench_interval_tree(c: &mut Criterion) {
    let p = Partition::luroth();
    let mut group = c.benchmark_group("interval-tree-depth-12");
    let words: Vec<Word> = Word::all_of_len(12).collect();
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("rayon", words.len()), |b| {
        b.iter(|| {
            map_indexed(words.len(), |i| interval(&p, &words[i], 1e-12).unwrap().lo.value.value)
        })
    });
    group.bench_function(BenchmarkId::new("sequential", words.len()), |b| {
        b.iter(|| {
            map_indexed_seq(words.len(), |i| interval(&p, &words[i], 1e-12).unwrap().lo.value.value)
        })
    });
    group.finish();
}

fn bench_cdf_grid(c: &mut Criterion) {
    let p = Partition::luroth();
    let eps = SignSpec::all_one();
    let grid = unit_grid(999);
    let mut group = c.benchmark_group("cdf-grid-999");
    group.bench_function("rayon", |b| {
        b.iter(|| map_indexed(grid.len(), |i| cdf(&p, &eps, grid[i], 1e-12).unwrap().value))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| map_indexed_seq(grid.len(), |i| cdf(&p, &eps, grid[i], 1e-12).unwrap().value))
    });
    group.finish();
}

fn bench_orbit_batch(c: &mut Criterion) {
    let p = Partition::dyadic();
    let eps = SignSpec::all_zero();
    let grid = unit_grid(99);
    let mut group = c.benchmark_group("orbits-16x20k");
    group.sample_size(10);
    group.bench_function("rayon", |b| {
        b.iter(|| map_indexed(16, |i| empirical_cdf(&p, &eps, None, &grid, 20_000, i as u64)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| map_indexed_seq(16, |i| empirical_cdf(&p, &eps, None, &grid, 20_000, i as u64)))
    });
    group.finish();
}

criterion_group!(benches, bench_interval_tree, bench_cdf_grid, bench_orbit_batch);
criterion_main!(benches);
