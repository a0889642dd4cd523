//! Simple undirected graphs with a canonical directed-edge index.
//!
//! Undirected edge `k = (u, v)` with `u < v` yields the directed edges
//! `2k` (`u → v`) and `2k + 1` (`v → u`), so reversal is `d ^ 1`.
//!
//! Adjacency is stored in CSR form. Every per-round message update in the
//! crate goes through [`Graph::exclusive_map`], which folds the messages
//! entering a vertex from all neighbours but one using prefix/suffix
//! accumulators, so no quantity is ever obtained by subtraction.

use std::collections::{HashSet, VecDeque};
use std::io::BufRead;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type DirEdge = usize;

/// Below this many directed edges rounds run on the calling thread.
const PAR_MIN_DIRECTED: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    offsets: Vec<usize>,
    /// `(neighbour, directed id of self → neighbour)` in CSR order.
    adj: Vec<(Vertex, DirEdge)>,
    /// CSR slot of each directed edge inside its tail's adjacency list.
    slot_of: Vec<usize>,
}

impl Graph {
    /// Builds a simple graph on `n` vertices. Rejects self-loops, duplicate
    /// edges and out-of-range endpoints. Edge order is preserved.
    pub fn new(n: usize, edge_list: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut edges = Vec::with_capacity(edge_list.len());
        for (k, &(a, b)) in edge_list.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {k} = ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {k} is a self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("edge {k} = ({a}, {b}) is a duplicate")));
            }
            edges.push(e);
        }

        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adj = vec![(0, 0); 2 * edges.len()];
        let mut slot_of = vec![0; 2 * edges.len()];
        for (k, &(u, v)) in edges.iter().enumerate() {
            adj[fill[u]] = (v, 2 * k);
            slot_of[2 * k] = fill[u];
            fill[u] += 1;
            adj[fill[v]] = (u, 2 * k + 1);
            slot_of[2 * k + 1] = fill[v];
            fill[v] += 1;
        }
        Ok(Graph { n, edges, offsets, adj, slot_of })
    }

    /// Graph whose vertex count is one more than the largest endpoint.
    pub fn from_edges(edge_list: &[(Vertex, Vertex)]) -> Result<Self> {
        let n = edge_list.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::new(n, edge_list)
    }

    /// Parses the edge-list text format: one `u v` pair per line, blank
    /// lines and `#` comments ignored. Vertex ids must be dense: every id
    /// below the maximum has to appear in some edge.
    pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        let mut present: Vec<bool> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse { line: lineno, reason: e.to_string() })?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut fields = body.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<Vertex> {
                let tok = tok.ok_or_else(|| Error::Parse {
                    line: lineno,
                    reason: "expected two vertex ids".into(),
                })?;
                tok.parse::<Vertex>().map_err(|_| Error::Parse {
                    line: lineno,
                    reason: format!("`{tok}` is not a nonnegative integer"),
                })
            };
            let a = parse(fields.next())?;
            let b = parse(fields.next())?;
            if let Some(extra) = fields.next() {
                return Err(Error::Parse { line: lineno, reason: format!("unexpected token `{extra}`") });
            }
            if a == b {
                return Err(Error::Parse { line: lineno, reason: format!("self-loop at vertex {a}") });
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Parse { line: lineno, reason: format!("duplicate edge {a} {b}") });
            }
            let hi = a.max(b);
            if present.len() <= hi {
                present.resize(hi + 1, false);
            }
            pairs.push((a, b));
            present[a] = true;
            present[b] = true;
        }
        if let Some(missing) = present.iter().position(|&p| !p) {
            return Err(Error::Parse {
                line: 0,
                reason: format!("vertex ids are not dense: {missing} appears in no edge"),
            });
        }
        Graph::from_edges(&pairs)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse_edge_list(text.as_bytes())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_directed(&self) -> usize {
        2 * self.edges.len()
    }

    /// Undirected edges as `(lower, higher)` pairs.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (Vertex, Vertex) {
        self.edges[k]
    }

    #[inline]
    pub fn rev(d: DirEdge) -> DirEdge {
        d ^ 1
    }

    #[inline]
    pub fn undirected(d: DirEdge) -> usize {
        d >> 1
    }

    /// Origin of a directed edge.
    #[inline]
    pub fn tail(&self, d: DirEdge) -> Vertex {
        let (u, v) = self.edges[d >> 1];
        if d & 1 == 0 {
            u
        } else {
            v
        }
    }

    /// Destination of a directed edge.
    #[inline]
    pub fn head(&self, d: DirEdge) -> Vertex {
        self.tail(d ^ 1)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `(neighbour, directed id v → neighbour)` pairs.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, DirEdge)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Directed edges pointing out of `v`.
    pub fn out_edges(&self, v: Vertex) -> impl Iterator<Item = DirEdge> + '_ {
        self.neighbors(v).iter().map(|&(_, d)| d)
    }

    /// Directed edges pointing into `v`.
    pub fn in_edges(&self, v: Vertex) -> impl Iterator<Item = DirEdge> + '_ {
        self.neighbors(v).iter().map(|&(_, d)| d ^ 1)
    }

    /// Directed edges `w → u` for `w ∈ ∂u ∖ v`, where `d = u → v`.
    pub fn neighbors_excluding(&self, d: DirEdge) -> Vec<DirEdge> {
        let u = self.tail(d);
        self.neighbors(u)
            .iter()
            .filter(|&&(_, out)| out != d)
            .map(|&(_, out)| out ^ 1)
            .collect()
    }

    /// Directed id of `a → b`, if that edge exists.
    pub fn find_directed(&self, a: Vertex, b: Vertex) -> Option<DirEdge> {
        self.neighbors(a).iter().find(|&&(w, _)| w == b).map(|&(_, d)| d)
    }

    pub fn isolated_vertex(&self) -> Option<Vertex> {
        (0..self.n).find(|&v| self.degree(v) == 0)
    }

    /// Component label per vertex, labels assigned in order of smallest vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = count;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &(w, _) in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 <= 1
    }

    /// True when the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        self.n_edges() + self.components().0 == self.n
    }

    /// BFS 2-colouring; component roots get [`Side::U`].
    pub fn bipartition(&self) -> Option<Bipartition> {
        self.two_colour().ok()
    }

    /// An odd cycle (as a closed vertex sequence without repetition of the
    /// start) when the graph is not bipartite.
    pub fn odd_cycle(&self) -> Option<Vec<Vertex>> {
        self.two_colour().err()
    }

    fn two_colour(&self) -> std::result::Result<Bipartition, Vec<Vertex>> {
        let mut side: Vec<Option<Side>> = vec![None; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![0usize; self.n];
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            if side[root].is_some() {
                continue;
            }
            side[root] = Some(Side::U);
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &(w, _) in self.neighbors(u) {
                    match side[w] {
                        None => {
                            side[w] = Some(su.other());
                            parent[w] = u;
                            depth[w] = depth[u] + 1;
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => {
                            // climb both BFS paths to their meeting point
                            let (mut a, mut b) = (u, w);
                            let mut left = vec![a];
                            let mut right = vec![b];
                            while depth[a] > depth[b] {
                                a = parent[a];
                                left.push(a);
                            }
                            while depth[b] > depth[a] {
                                b = parent[b];
                                right.push(b);
                            }
                            while a != b {
                                a = parent[a];
                                b = parent[b];
                                left.push(a);
                                right.push(b);
                            }
                            right.pop();
                            right.reverse();
                            left.extend(right);
                            return Err(left);
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(Bipartition { side: side.into_iter().map(Option::unwrap).collect() })
    }

    /// Per-directed-edge map over "all incoming messages but one".
    ///
    /// For every directed edge `d = u → v` this returns
    /// `finish(fold(combine, identity, [incoming(w → u) for w ∈ ∂u ∖ v]))`,
    /// with the fold order fixed by the adjacency list of `u`. The result is
    /// a pure function of the inputs, whatever the rayon pool size.
    pub fn exclusive_map<A, T, FIn, FComb, FFin>(
        &self,
        identity: A,
        incoming: FIn,
        combine: FComb,
        finish: FFin,
    ) -> Vec<T>
    where
        A: Copy + Send + Sync,
        T: Copy + Default + Send + Sync,
        FIn: Fn(DirEdge) -> A + Sync,
        FComb: Fn(A, A) -> A + Sync,
        FFin: Fn(A) -> T + Sync,
    {
        let m = self.n_directed();
        let mut prefix = vec![identity; m];
        let mut csr_out = vec![T::default(); m];

        let vertex_block = |first: Vertex, prefix: &mut [A], out: &mut [T]| {
            let base = self.offsets[first];
            let mut v = first;
            while v < self.n && self.offsets[v] - base < out.len() {
                let lo = self.offsets[v] - base;
                let hi = self.offsets[v + 1] - base;
                let nbrs = &self.adj[self.offsets[v]..self.offsets[v + 1]];
                let mut acc = identity;
                for (j, &(_, d)) in nbrs.iter().enumerate() {
                    prefix[lo + j] = acc;
                    acc = combine(acc, incoming(d ^ 1));
                }
                let mut suffix = identity;
                for j in (0..hi - lo).rev() {
                    out[lo + j] = finish(combine(prefix[lo + j], suffix));
                    suffix = combine(incoming(nbrs[j].1 ^ 1), suffix);
                }
                v += 1;
            }
        };

        if m < PAR_MIN_DIRECTED || rayon::current_num_threads() == 1 {
            vertex_block(0, &mut prefix, &mut csr_out);
        } else {
            let blocks = self.vertex_blocks(rayon::current_num_threads() * 4);
            let mut pieces = Vec::with_capacity(blocks.len());
            let (mut p_rest, mut o_rest) = (&mut prefix[..], &mut csr_out[..]);
            for w in blocks.windows(2) {
                let len = self.offsets[w[1]] - self.offsets[w[0]];
                let (p, pr) = p_rest.split_at_mut(len);
                let (o, or) = o_rest.split_at_mut(len);
                pieces.push((w[0], p, o));
                p_rest = pr;
                o_rest = or;
            }
            pieces.into_par_iter().for_each(|(first, p, o)| vertex_block(first, p, o));
        }

        let mut out = vec![T::default(); m];
        if m < PAR_MIN_DIRECTED {
            for (d, slot) in self.slot_of.iter().enumerate() {
                out[d] = csr_out[*slot];
            }
        } else {
            out.par_iter_mut()
                .zip(self.slot_of.par_iter())
                .for_each(|(o, &slot)| *o = csr_out[slot]);
        }
        out
    }

    /// [`exclusive_map`](Self::exclusive_map) writing into `out`, with no
    /// allocation on small graphs or single-thread pools. Bitwise identical
    /// to `exclusive_map`.
    pub fn exclusive_map_into<A, T, FIn, FComb, FFin>(
        &self,
        identity: A,
        incoming: FIn,
        combine: FComb,
        finish: FFin,
        scratch: &mut Vec<A>,
        out: &mut [T],
    ) where
        A: Copy + Send + Sync,
        T: Copy + Default + Send + Sync,
        FIn: Fn(DirEdge) -> A + Sync,
        FComb: Fn(A, A) -> A + Sync,
        FFin: Fn(A) -> T + Sync,
    {
        if self.n_directed() >= PAR_MIN_DIRECTED && rayon::current_num_threads() > 1 {
            out.copy_from_slice(&self.exclusive_map(identity, incoming, combine, finish));
            return;
        }
        for v in 0..self.n {
            let nbrs = &self.adj[self.offsets[v]..self.offsets[v + 1]];
            scratch.clear();
            let mut acc = identity;
            for &(_, d) in nbrs {
                scratch.push(acc);
                acc = combine(acc, incoming(d ^ 1));
            }
            let mut suffix = identity;
            for j in (0..nbrs.len()).rev() {
                let d = nbrs[j].1;
                out[d] = finish(combine(scratch[j], suffix));
                suffix = combine(incoming(d ^ 1), suffix);
            }
        }
    }

    /// Vertex boundaries splitting the CSR slots into roughly `parts` blocks.
    fn vertex_blocks(&self, parts: usize) -> Vec<Vertex> {
        let m = self.n_directed();
        let target = m.div_ceil(parts.max(1)).max(1);
        let mut cuts = vec![0];
        let mut next = target;
        for v in 0..self.n {
            if self.offsets[v] >= next {
                cuts.push(v);
                next = self.offsets[v] + target;
            }
        }
        cuts.push(self.n);
        cuts.dedup();
        cuts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    U,
    W,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::W,
            Side::W => Side::U,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub side: Vec<Side>,
}

impl Bipartition {
    /// The same 2-colouring with the two sides exchanged.
    pub fn swapped(&self) -> Bipartition {
        Bipartition { side: self.side.iter().map(|s| s.other()).collect() }
    }

    pub fn is_valid_for(&self, g: &Graph) -> bool {
        self.side.len() == g.n_vertices() && g.edges().iter().all(|&(u, v)| self.side[u] != self.side[v])
    }
}
