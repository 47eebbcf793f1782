use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use locc_bench::{five_param_tree, nine};
use locc_core::analysis::is_dissectible;
use locc_core::bound::optimize_bound;
use locc_core::c64;
use locc_core::protocol::run_protocol;
use locc_core::strategies::{evaluate, StrategyFamily};
use locc_core::weakmeas::{majority_sum, simulate_stream, WeakScheme};

fn protocols(c: &mut Criterion) {
    let e = nine();
    let tree = five_param_tree();
    c.bench_function("run five-param tree", |b| {
        b.iter(|| run_protocol(black_box(&tree), &e).unwrap())
    });
    c.bench_function("evaluate single-p", |b| {
        b.iter(|| evaluate(StrategyFamily::SingleP, black_box(&[0.837]), &e).unwrap())
    });
    c.bench_function("dissect nine", |b| {
        b.iter(|| is_dissectible(black_box(&e)).unwrap())
    });
}

fn bounds(c: &mut Criterion) {
    c.bench_function("optimize bound", |b| b.iter(|| optimize_bound().unwrap()));
}

fn weak(c: &mut Criterion) {
    c.bench_function("majority sum K=1001", |b| {
        b.iter(|| majority_sum(black_box(0.05), 1001).unwrap())
    });
    let scheme = WeakScheme::new(0.05, 1001, 0).unwrap();
    let (a0, a1) = (c64::new(0.6, 0.0), c64::new(0.8, 0.0));
    let mut run = 0u64;
    c.bench_function("weak stream K=1001", |b| {
        b.iter(|| {
            run += 1;
            simulate_stream(a0, a1, &scheme, run).unwrap()
        })
    });
}

criterion_group!(benches, protocols, bounds, weak);
criterion_main!(benches);
