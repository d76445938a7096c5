use std::sync::Arc;

use conjred::dlo::dlo_reduce;
use conjred::graph::{choice_set, graph_reduce_with, SwapMemo, VertexCode};
use conjred::invariants::{cycle_type, SupportedPermutation};
use conjred::rado::rado_witness;
use conjred::StagedMap;
use conjred_bench::{graphs, orders, witness_sets};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn rado(c: &mut Criterion) {
    let mut g = c.benchmark_group("rado_witness");
    for size in [4, 16, 64] {
        let (u, v) = witness_sets(size);
        g.bench_with_input(BenchmarkId::from_parameter(size), &(u, v), |b, (u, v)| {
            b.iter(|| rado_witness(black_box(u), black_box(v)).unwrap())
        });
    }
    g.finish();
}

fn choice(c: &mut Criterion) {
    let mut g = c.benchmark_group("choice_set");
    for i in [2usize, 4, 8] {
        let n = num_bigint::BigUint::from(u64::MAX) << 64u32;
        g.bench_with_input(BenchmarkId::from_parameter(i), &n, |b, n| b.iter(|| choice_set(i, black_box(n)).unwrap()));
    }
    g.finish();
}

fn swap(c: &mut Criterion) {
    c.bench_function("swap_codes_below_2000_fresh_arena", |b| {
        b.iter(|| {
            let memo = SwapMemo::new();
            let arena = memo.arena().clone();
            for code in 0..2000u64 {
                black_box(memo.swap_id(arena.intern(&VertexCode::from(code))));
            }
        })
    });
}

fn graph_reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("graph_reduce");
    g.sample_size(10);
    for (name, x) in graphs() {
        let x = Arc::new(x);
        g.bench_function(BenchmarkId::new(name, 64), |b| b.iter(|| graph_reduce_with(x.clone(), 64).stage(64)));
    }
    g.finish();
}

fn dlo_reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("dlo_reduce");
    for (name, x) in orders() {
        g.bench_function(BenchmarkId::new(name, 500), |b| b.iter(|| dlo_reduce(&x).unwrap().stage(500)));
    }
    g.finish();
}

fn cycles(c: &mut Criterion) {
    let p = SupportedPermutation::new((0..1000u64).map(|k| (k, (k + 1) % 1000))).unwrap();
    c.bench_function("cycle_type_1000", |b| b.iter(|| cycle_type(black_box(&p), 2000).unwrap()));
}

criterion_group!(benches, rado, choice, swap, graph_reduction, dlo_reduction, cycles);
criterion_main!(benches);
