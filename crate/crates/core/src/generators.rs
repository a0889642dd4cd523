//! Standard graph families and seeded random graphs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::graph::{Graph, Vertex};

type Rng64 = rand::rngs::StdRng;

fn build(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
    Graph::new(n, edges).expect("generator produced an invalid graph")
}

/// Cycle `C_n` on vertices `0..n`, `n ≥ 3`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &edges)
}

/// Path on `n` vertices (`n − 1` edges).
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &edges)
}

/// Star `K_{1,leaves}` with centre 0.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    build(leaves + 1, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    build(n, &edges)
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            edges.push((i, a + j));
        }
    }
    build(a + b, &edges)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    build(10, &edges)
}

/// Uniform `G(n, m)` graph, possibly with isolated vertices.
pub fn random_gnm(n: usize, m: usize, seed: u64) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    assert!(m <= max, "too many edges requested");
    let mut rng = Rng64::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    build(n, &edges)
}

/// Random labelled tree on `n ≥ 1` vertices (random attachment order).
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = Rng64::seed_from_u64(seed);
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut rng);
    let edges: Vec<_> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    build(n, &edges)
}

/// Random bipartite graph with sides `0..left` and `left..left+right`,
/// each cross pair present with probability `p`.
pub fn random_bipartite(left: usize, right: usize, p: f64, seed: u64) -> Graph {
    let mut rng = Rng64::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..left {
        for j in 0..right {
            if rng.gen_bool(p) {
                edges.push((i, left + j));
            }
        }
    }
    build(left + right, &edges)
}

/// Drops isolated vertices and relabels the rest densely, keeping order.
pub fn without_isolated(g: &Graph) -> Graph {
    let mut map = vec![usize::MAX; g.n_vertices()];
    let mut next = 0;
    for (v, slot) in map.iter_mut().enumerate() {
        if g.degree(v) > 0 {
            *slot = next;
            next += 1;
        }
    }
    let edges: Vec<_> = g.edges().iter().map(|&(u, v)| (map[u], map[v])).collect();
    build(next, &edges)
}

/// One representative of every isomorphism class of connected graphs with
/// exactly `n` vertices (`1 ≤ n ≤ 7`), found by brute-force canonical forms.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "exhaustive enumeration only up to 7 vertices");
    let pairs: Vec<(Vertex, Vertex)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let index_of = |a: Vertex, b: Vertex| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();

    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        perms.push(pairs.iter().map(|&(a, b)| index_of(p[a], p[b])).collect());
    });

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let g = build(n, &edges);
        if !g.is_connected() {
            continue;
        }
        let canon = perms
            .iter()
            .map(|map| {
                (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).fold(0u32, |acc, i| acc | 1 << map[i])
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Random graph without isolated vertices: `G(n, m)` followed by
/// [`without_isolated`].
pub fn random_dense_ids(n: usize, m: usize, rng: &mut impl Rng) -> Graph {
    without_isolated(&random_gnm(n, m, rng.gen()))
}

/// Named small graphs used for exhaustive checks: every connected graph on
/// 2 to 6 vertices, `random` seeded random graphs with at most 12 edges and
/// no isolated vertices, cycles `C_3..C_8`, paths `P_2..P_8`, stars
/// `K_{1,1}..K_{1,6}` and the Petersen graph.
pub fn standard_corpus(random: usize, seed: u64) -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 2..=6 {
        for (i, g) in connected_graphs(n).into_iter().enumerate() {
            out.push((format!("connected-{n}-{i}"), g));
        }
    }
    let mut rng = Rng64::seed_from_u64(seed);
    for i in 0..random {
        let n = rng.gen_range(4..=10);
        let m = rng.gen_range(1..=12.min(n * (n - 1) / 2));
        out.push((format!("random-{i}"), random_dense_ids(n, m, &mut rng)));
    }
    for n in 3..=8 {
        out.push((format!("cycle-{n}"), cycle(n)));
    }
    for n in 2..=8 {
        out.push((format!("path-{n}"), path(n)));
    }
    for k in 1..=6 {
        out.push((format!("star-{k}"), star(k)));
    }
    out.push(("petersen".into(), petersen()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts_of_connected_graphs() {
        // OEIS A001349
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(petersen().n_edges(), 15);
        assert!((0..10).all(|v| petersen().degree(v) == 3));
        assert_eq!(complete_bipartite(3, 3).n_edges(), 9);
        assert_eq!(star(4).degree(0), 4);
        let t = random_tree(12, 3);
        assert!(t.is_forest() && t.is_connected());
    }
}
