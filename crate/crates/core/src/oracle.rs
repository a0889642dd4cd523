//! Brute-force ground truth.
//!
//! Everything here is a scan or a textbook combinatorial algorithm, kept
//! structurally apart from the message-passing code so that agreement
//! between the two is evidence rather than tautology. Caps fail loudly.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph, Side};
use crate::half::HalfInt;
use crate::zero_temp::BoolMsgVec;

pub const MATCHING_CAP: usize = 24;
pub const NU_STAR_CAP: usize = 12;
pub const GRID_CAP: usize = 10;
pub const TAU_CAP: usize = 24;
pub const TAU_HALF_CAP: usize = 16;
pub const PP_CAP: usize = 8;

fn cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

/// Matching counts by size, from backtracking over the edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingCounts {
    /// `counts[k]` = number of matchings with `k` edges.
    pub counts: Vec<u64>,
    /// Matching number `ν(G)`.
    pub nu: usize,
}

fn backtrack_matchings(g: &Graph, visit: &mut dyn FnMut(&[usize])) {
    fn go(g: &Graph, k: usize, used: &mut Vec<bool>, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == g.n_edges() {
            visit(chosen);
            return;
        }
        let (u, v) = g.edge(k);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            chosen.push(k);
            go(g, k + 1, used, chosen, visit);
            chosen.pop();
            used[u] = false;
            used[v] = false;
        }
        go(g, k + 1, used, chosen, visit);
    }
    let mut used = vec![false; g.n_vertices()];
    go(g, 0, &mut used, &mut Vec::new(), visit);
}

pub fn enumerate_matchings(g: &Graph) -> Result<MatchingCounts> {
    cap("edges for matching enumeration", g.n_edges(), MATCHING_CAP)?;
    let mut counts = vec![0u64; g.n_vertices() / 2 + 1];
    backtrack_matchings(g, &mut |m| counts[m.len()] += 1);
    let nu = counts.iter().rposition(|&c| c > 0).unwrap_or(0);
    counts.truncate(nu + 1);
    Ok(MatchingCounts { counts, nu })
}

/// `μ^z(B_e = 1)` by summing `z^{|B|}` over every matching.
pub fn edge_marginals_by_enumeration(g: &Graph, z: f64) -> Result<Vec<f64>> {
    cap("edges for matching enumeration", g.n_edges(), MATCHING_CAP)?;
    let mut total = 0.0;
    let mut per_edge = vec![0.0; g.n_edges()];
    backtrack_matchings(g, &mut |m| {
        let w = z.powi(m.len() as i32);
        total += w;
        for &e in m {
            per_edge[e] += w;
        }
    });
    Ok(per_edge.into_iter().map(|w| w / total).collect())
}

/// All matchings as edge-id lists.
pub fn list_matchings(g: &Graph) -> Result<Vec<Vec<usize>>> {
    cap("edges for matching enumeration", g.n_edges(), MATCHING_CAP)?;
    let mut out = Vec::new();
    backtrack_matchings(g, &mut |m| out.push(m.to_vec()));
    Ok(out)
}

/// Maximum of `Σ x_e` over `x ∈ {0, 1/2, 1}^E ∩ FM(G)`, by full scan.
pub fn nu_star_bruteforce(g: &Graph) -> Result<HalfInt> {
    cap("edges for the half-integral scan", g.n_edges(), NU_STAR_CAP)?;
    Ok(HalfInt::from_twice(grid_max(g, 2) as i64))
}

/// Maximum of `Σ x_e` over `x ∈ {0, 1/4, …, 1}^E ∩ FM(G)`, in quarters.
pub fn nu_star_quarter_grid(g: &Graph) -> Result<u64> {
    cap("edges for the quarter grid scan", g.n_edges(), GRID_CAP)?;
    Ok(grid_max(g, 4))
}

/// Largest total of `x ∈ {0, 1, …, steps}^E` with every vertex load at
/// most `steps`.
fn grid_max(g: &Graph, steps: u64) -> u64 {
    let m = g.n_edges();
    let mut x = vec![0u64; m];
    let mut best = 0;
    loop {
        let mut load = vec![0u64; g.n_vertices()];
        for (k, &(u, v)) in g.edges().iter().enumerate() {
            load[u] += x[k];
            load[v] += x[k];
        }
        if load.iter().all(|&l| l <= steps) {
            best = best.max(x.iter().sum());
        }
        let mut k = 0;
        while k < m && x[k] == steps {
            x[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
        x[k] += 1;
    }
    best
}

/// Minimum vertex cover size over all `2^|V|` subsets.
pub fn tau_bruteforce(g: &Graph) -> Result<usize> {
    cap("vertices for the cover scan", g.n_vertices(), TAU_CAP)?;
    let edge_masks: Vec<u32> = g.edges().iter().map(|&(u, v)| 1 << u | 1 << v).collect();
    let mut best = g.n_vertices();
    for mask in 0u32..(1u32 << g.n_vertices()) {
        let size = mask.count_ones() as usize;
        if size < best && edge_masks.iter().all(|&e| mask & e != 0) {
            best = size;
        }
    }
    Ok(best)
}

/// Minimum of `Σ y_v` over `y ∈ {0, 1/2, 1}^V` covering every edge, by
/// depth-first assignment with a running-total cut.
pub fn tau_half_bruteforce(g: &Graph) -> Result<HalfInt> {
    cap("vertices for the half-integral cover scan", g.n_vertices(), TAU_HALF_CAP)?;
    fn go(g: &Graph, v: usize, y: &mut Vec<u8>, total: usize, best: &mut usize) {
        if total >= *best {
            return;
        }
        if v == g.n_vertices() {
            *best = total;
            return;
        }
        for val in 0..=2u8 {
            let ok = g.neighbors(v).iter().all(|&(u, _)| u > v || y[u] + val >= 2);
            if ok {
                y[v] = val;
                go(g, v + 1, y, total + val as usize, best);
            }
        }
    }
    let mut best = 2 * g.n_vertices() + 1;
    go(g, 0, &mut vec![0; g.n_vertices()], 0, &mut best);
    Ok(HalfInt::from_twice(best as i64))
}

/// Maximum matching size of a bipartite graph (Hopcroft–Karp).
pub fn bipartite_max_matching(g: &Graph, b: &Bipartition) -> Result<usize> {
    if !b.is_valid_for(g) {
        return Err(Error::NotBipartite { cycle: g.odd_cycle().unwrap_or_default() });
    }
    const NONE: usize = usize::MAX;
    let n = g.n_vertices();
    let left: Vec<usize> = (0..n).filter(|&v| b.side[v] == Side::U).collect();
    let mut mate = vec![NONE; n];
    let mut dist = vec![0usize; n];
    let mut size = 0;

    loop {
        let mut queue = VecDeque::new();
        for &u in &left {
            if mate[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in g.neighbors(u) {
                let m = mate[w];
                if m == NONE {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[u] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        for &u in &left {
            if mate[u] == NONE && augment(g, u, &mut mate, &mut dist) {
                size += 1;
            }
        }
    }
    return Ok(size);

    fn augment(g: &Graph, u: usize, mate: &mut [usize], dist: &mut [usize]) -> bool {
        for &(w, _) in g.neighbors(u) {
            let m = mate[w];
            if m == usize::MAX || (dist[m] == dist[u] + 1 && augment(g, m, mate, dist)) {
                mate[u] = w;
                mate[w] = u;
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }
}

/// `℘(I)`, evaluated directly from the definition.
pub fn naive_p_map(g: &Graph, i: &BoolMsgVec) -> BoolMsgVec {
    BoolMsgVec(
        (0..g.n_directed())
            .map(|d| g.neighbors_excluding(d).iter().map(|&w| i.0[w] as usize).sum::<usize>() == 0)
            .collect(),
    )
}

/// `F_v(I)`, evaluated directly from the definition.
pub fn naive_f(g: &Graph, i: &BoolMsgVec, v: usize) -> usize {
    let mut into = 0;
    let mut out = 0;
    for d in 0..g.n_directed() {
        if g.head(d) == v {
            into += i.0[d] as usize;
        }
        if g.tail(d) == v {
            out += i.0[d] as usize;
        }
    }
    into.min(1) + 1usize.saturating_sub(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpFixedPoints {
    /// Every `I` with `I = ℘(℘(I))`, with `Σ_v F_v(I)`.
    pub points: Vec<(BoolMsgVec, usize)>,
    pub min_f: usize,
}

/// Scans all `2^{2|E|}` boolean message vectors for double-map fixed points.
pub fn enumerate_pp_fixed_points(g: &Graph) -> Result<PpFixedPoints> {
    cap("edges for the fixed-point scan", g.n_edges(), PP_CAP)?;
    let mut points = Vec::new();
    for mask in 0u64..(1u64 << g.n_directed()) {
        let i = BoolMsgVec::from_mask(g, mask);
        if naive_p_map(g, &naive_p_map(g, &i)) == i {
            let f = (0..g.n_vertices()).map(|v| naive_f(g, &i, v)).sum();
            points.push((i, f));
        }
    }
    let min_f = points.iter().map(|p| p.1).min().expect("the scan always finds a fixed point");
    Ok(PpFixedPoints { points, min_f })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Enumeration,
    HalfIntegralScan,
    AugmentingPath,
}

impl OracleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMethod::Enumeration => "enumeration",
            OracleMethod::HalfIntegralScan => "half-integral-scan",
            OracleMethod::AugmentingPath => "augmenting-path",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub nu: Option<usize>,
    pub tau: Option<usize>,
    pub nu_star: Option<HalfInt>,
    pub tau_star: Option<HalfInt>,
    /// How `nu_star` was obtained.
    pub method: Option<OracleMethod>,
    pub matching_counts: Option<Vec<u64>>,
    /// `min Σ_v F_v` over `℘∘℘` fixed points.
    pub pp_min_f: Option<usize>,
    /// One line per quantity skipped because of a cap.
    pub notices: Vec<String>,
}

/// Runs every oracle that fits within its cap.
pub fn oracle_report(g: &Graph) -> OracleReport {
    fn keep<T>(notices: &mut Vec<String>, r: Result<T>) -> Option<T> {
        r.map_err(|e| notices.push(e.to_string())).ok()
    }
    let mut notices = Vec::new();
    let bip = g.bipartition();
    let enumerated = keep(&mut notices, enumerate_matchings(g));
    let tau = keep(&mut notices, tau_bruteforce(g));
    let tau_star = keep(&mut notices, tau_half_bruteforce(g));
    let scan = keep(&mut notices, nu_star_bruteforce(g));
    let pp = keep(&mut notices, enumerate_pp_fixed_points(g));
    let hk = bip.as_ref().and_then(|b| bipartite_max_matching(g, b).ok());

    let nu = enumerated.as_ref().map(|m| m.nu).or(hk);
    let (nu_star, method) = match (scan, &bip, hk, tau_star) {
        (Some(v), _, _, _) => (Some(v), Some(OracleMethod::HalfIntegralScan)),
        (None, Some(_), Some(n), _) => (Some(HalfInt::from_int(n as i64)), Some(OracleMethod::AugmentingPath)),
        (None, _, _, Some(t)) => (Some(t), Some(OracleMethod::Enumeration)),
        _ => (None, None),
    };
    OracleReport {
        nu,
        tau,
        nu_star,
        tau_star,
        method,
        matching_counts: enumerated.map(|m| m.counts),
        pp_min_f: pp.map(|p| p.min_f),
        notices,
    }
}
