#![allow(dead_code)]

use labp::{generators, Graph};
use proptest::prelude::*;

/// `G(n, m)` with isolated vertices removed and at least one edge.
pub fn graph(max_n: usize, max_m: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(move |n| (Just(n), 1..=max_m.min(n * (n - 1) / 2), any::<u64>()))
        .prop_map(|(n, m, seed)| generators::without_isolated(&generators::random_gnm(n, m, seed)))
}

pub fn tree(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| generators::random_tree(n, seed))
}

/// Random bipartite graph, isolated vertices removed, at least one edge.
pub fn bipartite(max_side: usize) -> impl Strategy<Value = Graph> {
    (1..=max_side, 1..=max_side, 0.2f64..0.9, any::<u64>()).prop_filter_map("no edges", |(a, b, p, seed)| {
        let g = generators::without_isolated(&generators::random_bipartite(a, b, p, seed));
        (g.n_edges() > 0).then_some(g)
    })
}

pub fn small_named() -> Vec<Graph> {
    vec![
        generators::cycle(3),
        generators::cycle(4),
        generators::cycle(5),
        generators::path(2),
        generators::path(5),
        generators::star(4),
        generators::complete(4),
        generators::complete_bipartite(2, 3),
    ]
}
