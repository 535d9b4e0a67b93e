use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use linfty_bench::{euclidean, sample, two_periodic};
use linfty_core::{bw_extract, embed_t1, net_distance};

fn net(c: &mut Criterion) {
    let mut g = c.benchmark_group("net_distance");
    for dim in [1, 2, 3] {
        let space = euclidean(dim);
        let x = sample(dim);
        let v = x.scaled(1.0 / space.norm(&x).unwrap());
        g.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| net_distance(&space, black_box(&v), 10_000).unwrap())
        });
    }
    g.finish();
}

fn prefix_sup(c: &mut Criterion) {
    let space = euclidean(3);
    let t = embed_t1(&space, &sample(3)).unwrap();
    c.bench_function("prefix_sup_2e4", |b| b.iter(|| t.prefix_sup(black_box(20_000)).unwrap()));
}

fn extraction(c: &mut Criterion) {
    let d = two_periodic();
    let mut g = c.benchmark_group("bw_extract");
    for depth in [2, 4, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &depth| {
            b.iter(|| bw_extract(&d, depth, 4096).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, net, prefix_sup, extraction);
criterion_main!(benches);
