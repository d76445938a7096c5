use std::sync::Arc;

use conjred::dlo::rational::{cw_rational, cw_rational_u64};
use conjred::dlo::{dlo_reduce, orbital_classify, Parity, RationalMap};
use conjred::graph::{graph_conjugator, graph_reduce_with, recover_graph_iso};
use conjred::staged::audit_coherence;
use conjred::structure::{parse_structure, ListedGraph, Structure};
use conjred::{PartialMap, StagedMap};
use proptest::prelude::*;

#[test]
fn graph_file_to_reduction() {
    let Structure::Graph(g) = parse_structure("graph 4\ne 0 1\ne 2 3\n").unwrap() else { panic!("not a graph") };
    let r = graph_reduce_with(Arc::new(g), 16);
    audit_coherence(&r, 16).unwrap();
    let st = r.stage(16);
    for (k, v) in st.iter() {
        assert_eq!(st.get(v), Some(k));
    }
    // Stages only grow.
    assert!(r.stage(8).is_restriction_of(&st));
}

#[test]
fn order_file_to_orbitals() {
    let Structure::Order(o) = parse_structure("order finite 3\nrank 0 2\nrank 1 0\nrank 2 1\n").unwrap() else {
        panic!("not an order")
    };
    let phi = dlo_reduce(&o).unwrap();
    let fixed = (0..200)
        .map(cw_rational_u64)
        .filter(|q| orbital_classify(phi.inner(), q).unwrap() == Parity::Fixed)
        .count();
    // Three image points, each enumerated once.
    assert_eq!(fixed, 3);
    let st = phi.stage(50);
    assert_eq!(st.len(), 50);
    for (k, v) in st.iter() {
        let q = cw_rational_u64(k.as_u64().unwrap());
        let img = phi.inner().apply(&q).unwrap();
        assert!(img >= q);
        assert_eq!(cw_rational(&v.to_biguint(1 << 16).unwrap()), img);
    }
}

fn graph_and_perm() -> impl Strategy<Value = (ListedGraph, Vec<u64>)> {
    (2u64..=5).prop_flat_map(|n| {
        let pairs: Vec<(u64, u64)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (
            proptest::collection::vec(any::<bool>(), m)
                .prop_map(move |keep| ListedGraph::finite(n, &pairs.iter().zip(keep).filter(|p| p.1).map(|p| *p.0).collect::<Vec<_>>())),
            Just((0..n).collect::<Vec<u64>>()).prop_shuffle(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugator_commutes_on_delta_and_round_trips((x, perm) in graph_and_perm()) {
        let y = x.relabel(&perm);
        let a = PartialMap::from_pairs(perm.iter().enumerate().map(|(i, &j)| (i as u64, j))).unwrap();
        let hx = Arc::new(graph_reduce_with(Arc::new(x.clone()), 4));
        let hy = Arc::new(graph_reduce_with(Arc::new(y.clone()), 4));
        let gamma = graph_conjugator(hx.clone(), hy, &a).unwrap();
        gamma.verify_on_delta(60).unwrap();
        let alpha = gamma.alpha().prefix(64, 1 << 12);
        let got = recover_graph_iso(&x, &y, &alpha, hx.delta().memo(), x.core_size()).unwrap();
        prop_assert_eq!(got, a);
    }
}
