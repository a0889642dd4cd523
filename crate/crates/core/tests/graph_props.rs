mod common;

use labp::{generators, Error, Graph, Side};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn directed_ids_are_reversal_pairs(g in common::graph(12, 30)) {
        prop_assert_eq!(g.n_directed(), 2 * g.n_edges());
        for d in 0..g.n_directed() {
            prop_assert_eq!(Graph::rev(Graph::rev(d)), d);
            prop_assert_eq!(g.head(d), g.tail(Graph::rev(d)));
            prop_assert_eq!(g.tail(d), g.head(Graph::rev(d)));
        }
    }

    #[test]
    fn degrees_sum_to_twice_edges(g in common::graph(12, 30)) {
        let total: usize = (0..g.n_vertices()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.n_edges());
    }

    #[test]
    fn neighbors_excluding_points_into_tail(g in common::graph(10, 25)) {
        for d in 0..g.n_directed() {
            let (u, v) = (g.tail(d), g.head(d));
            let ex = g.neighbors_excluding(d);
            prop_assert_eq!(ex.len(), g.degree(u) - 1);
            for w in ex {
                prop_assert_eq!(g.head(w), u);
                prop_assert_ne!(g.tail(w), v);
            }
        }
    }

    #[test]
    fn edge_list_round_trips(g in common::graph(10, 25)) {
        let text: String = g.edges().iter().map(|(u, v)| format!("{u} {v}\n")).collect();
        let back = Graph::parse_str(&format!("# header\n\n{text}")).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.n_vertices(), g.n_vertices());
    }

    #[test]
    fn bipartite_graphs_get_valid_bipartitions(g in common::bipartite(7)) {
        let b = g.bipartition().expect("bipartite by construction");
        prop_assert!(b.is_valid_for(&g));
        prop_assert!(g.odd_cycle().is_none());
    }
}

#[test]
fn bipartition_is_exact_on_all_small_connected_graphs() {
    for n in 2..=6 {
        for g in generators::connected_graphs(n) {
            match g.bipartition() {
                Some(b) => {
                    assert!(g.edges().iter().all(|&(u, v)| b.side[u] != b.side[v]));
                    assert_eq!(b.side[0], Side::U);
                }
                None => {
                    let cycle = g.odd_cycle().unwrap();
                    assert_eq!(cycle.len() % 2, 1);
                    for i in 0..cycle.len() {
                        assert!(g.find_directed(cycle[i], cycle[(i + 1) % cycle.len()]).is_some());
                    }
                }
            }
        }
    }
}

#[test]
fn parse_rejections() {
    for (text, line) in [("0 0", 1), ("0 1\n1 0", 2), ("0 1\nx y", 2), ("0 1 2", 1)] {
        match Graph::parse_str(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}
