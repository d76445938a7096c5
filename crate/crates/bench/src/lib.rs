//! Fixtures for the benchmarks.

use std::collections::BTreeSet;

use conjred::structure::{Catalog, ListedGraph, OrderOracle};
use conjred::Nat;

/// Small graphs: a path, a cycle and a permuted copy of the cycle.
pub fn graphs() -> Vec<(&'static str, ListedGraph)> {
    vec![
        ("P4", ListedGraph::finite(4, &[(0, 1), (1, 2), (2, 3)])),
        ("C5", ListedGraph::finite(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])),
        ("C5'", ListedGraph::finite(5, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)])),
    ]
}

pub fn orders() -> Vec<(&'static str, OrderOracle)> {
    vec![
        ("finite6", OrderOracle::finite(vec![3, 0, 5, 1, 4, 2]).expect("a permutation")),
        ("N", OrderOracle::catalog(Catalog::N)),
        ("Z", OrderOracle::catalog(Catalog::Z)),
    ]
}

/// Disjoint sets of `size` naturals each, spread below `64 * size`.
pub fn witness_sets(size: u64) -> (BTreeSet<Nat>, BTreeSet<Nat>) {
    let u = (0..size).map(|k| Nat::small(k * 64)).collect();
    let v = (0..size).map(|k| Nat::small(k * 64 + 1)).collect();
    (u, v)
}
