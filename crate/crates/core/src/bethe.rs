//! Bethe free entropy, exact partition functions and the loop series.

use std::collections::HashMap;

use crate::bp::{self, FractionalMatching, LabpConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Edge cap for exact matching polynomials.
pub const POLY_CAP: usize = 30;
/// Edge cap for generalized-loop enumeration.
pub const LOOP_CAP: usize = 24;
/// Edge cap for the matching-by-matching reparameterization check.
pub const REPARAM_CAP: usize = 12;

const FM_TOL: f64 = 1e-9;

fn check_fm<T: Scalar>(g: &Graph, x: &FractionalMatching<T>) -> Result<()> {
    if x.x.len() != g.n_edges() {
        return Err(Error::Domain(format!("expected {} edge weights, got {}", g.n_edges(), x.x.len())));
    }
    let bad = x.infeasibility(g);
    if !(bad <= T::of(FM_TOL)) || x.x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("x leaves the fractional matching polytope by {bad}")));
    }
    Ok(())
}

fn check_interior<T: Scalar>(x: &FractionalMatching<T>) -> Result<()> {
    if let Some(k) = x.x.iter().position(|&v| !(v > T::zero() && v < T::one())) {
        return Err(Error::Domain(format!("x[{k}] = {} is not strictly inside (0, 1)", x.x[k])));
    }
    Ok(())
}

fn loads<T: Scalar>(g: &Graph, x: &FractionalMatching<T>) -> Vec<T> {
    (0..g.n_vertices()).map(|v| x.load(g, v).min(T::one())).collect()
}

/// `S^B(x) = ½ Σ_v { Σ_{e∈∂v} [−x_e ln x_e + (1−x_e) ln(1−x_e)] − 2(1−s_v) ln(1−s_v) }`
/// with `s_v = Σ_{e∈∂v} x_e` and `0 ln 0 = 0`.
pub fn bethe_entropy<T: Scalar>(g: &Graph, x: &FractionalMatching<T>) -> Result<T> {
    check_fm(g, x)?;
    let s = loads(g, x);
    let two = T::of(2.0);
    let mut total = T::zero();
    for v in 0..g.n_vertices() {
        let mut acc = T::zero();
        for d in g.out_edges(v) {
            let xe = x.x[Graph::undirected(d)].max(T::zero()).min(T::one());
            acc = acc - xe.xlogx() + (T::one() - xe).xlogx();
        }
        acc = acc - two * (T::one() - s[v]).xlogx();
        total = total + acc;
    }
    Ok(total / two)
}

/// `−U^B(x) = Σ_e x_e`.
pub fn bethe_energy<T: Scalar>(x: &FractionalMatching<T>) -> T {
    -x.value()
}

/// `Φ^B(x; z) = (Σ_e x_e) ln z + S^B(x)`.
pub fn bethe_free_entropy<T: Scalar>(g: &Graph, x: &FractionalMatching<T>, z: T) -> Result<T> {
    bp::check_z(z)?;
    Ok(x.value() * z.ln() + bethe_entropy(g, x)?)
}

/// `∂Φ^B/∂x_e = ln z + ln((1−s_u)(1−s_v) / (x_e(1−x_e)))` at interior `x`.
pub fn bethe_gradient<T: Scalar>(g: &Graph, x: &FractionalMatching<T>, z: T) -> Result<Vec<T>> {
    bp::check_z(z)?;
    check_fm(g, x)?;
    check_interior(x)?;
    let s = loads(g, x);
    if let Some(v) = s.iter().position(|&l| l >= T::one()) {
        return Err(Error::Domain(format!("vertex {v} is saturated")));
    }
    Ok(g
        .edges()
        .iter()
        .zip(&x.x)
        .map(|(&(u, v), &xe)| z.ln() + ((T::one() - s[u]) * (T::one() - s[v]) / (xe * (T::one() - xe))).ln())
        .collect())
}

/// `P_G(z) = Σ_k c_k z^k`, `c_k` the number of `k`-edge matchings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingPolynomial {
    pub coeffs: Vec<u64>,
}

impl MatchingPolynomial {
    pub fn eval<T: Scalar>(&self, z: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * z + T::of(c as f64))
    }

    /// `ln P_G(z)` without overflow for large `z`.
    pub fn ln_eval<T: Scalar>(&self, z: T) -> T {
        let lz = z.ln();
        let terms: Vec<T> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| T::of(c as f64).ln() + T::of_usize(k) * lz)
            .collect();
        let top = terms.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        top + terms.iter().fold(T::zero(), |a, &t| a + (t - top).exp()).ln()
    }

    /// Largest matching size.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

struct PolyMemo<'a> {
    g: &'a Graph,
    memo: HashMap<u64, Vec<u64>>,
}

impl PolyMemo<'_> {
    /// Matching polynomial of the subgraph induced by `mask`.
    fn poly(&mut self, mask: u64) -> Vec<u64> {
        if let Some(p) = self.memo.get(&mask) {
            return p.clone();
        }
        let p = match (0..self.g.n_vertices()).find(|&v| mask >> v & 1 == 1 && self.g.degree(v) > 0) {
            None => vec![1],
            Some(v) => {
                let rest = mask & !(1 << v);
                let mut p = self.poly(rest);
                for &(u, _) in self.g.neighbors(v) {
                    if rest >> u & 1 == 1 {
                        let q = self.poly(rest & !(1 << u));
                        if p.len() < q.len() + 1 {
                            p.resize(q.len() + 1, 0);
                        }
                        for (k, c) in q.iter().enumerate() {
                            p[k + 1] += c;
                        }
                    }
                }
                p
            }
        };
        self.memo.insert(mask, p.clone());
        p
    }
}

fn check_cap(g: &Graph, what: &'static str, cap: usize) -> Result<()> {
    if g.n_edges() > cap {
        return Err(Error::CapExceeded { what, size: g.n_edges(), cap });
    }
    if g.n_vertices() > 64 {
        return Err(Error::CapExceeded { what: "vertices for bitmask recursion", size: g.n_vertices(), cap: 64 });
    }
    Ok(())
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exact matching polynomial by vertex-deletion recursion,
/// `P_G = P_{G−v} + z Σ_{u∈∂v} P_{G−u−v}`, memoised on vertex subsets.
pub fn matching_polynomial(g: &Graph) -> Result<MatchingPolynomial> {
    check_cap(g, "edges for the matching polynomial", POLY_CAP)?;
    let mut memo = PolyMemo { g, memo: HashMap::new() };
    Ok(MatchingPolynomial { coeffs: memo.poly(full_mask(g.n_vertices())) })
}

/// `μ^z(B_e = 1) = z P_{G−u−v}(z) / P_G(z)` for every edge.
pub fn gibbs_marginals<T: Scalar>(g: &Graph, z: T) -> Result<Vec<T>> {
    bp::check_z(z)?;
    check_cap(g, "edges for the matching polynomial", POLY_CAP)?;
    let mut memo = PolyMemo { g, memo: HashMap::new() };
    let all = full_mask(g.n_vertices());
    let ln_p = MatchingPolynomial { coeffs: memo.poly(all) }.ln_eval(z);
    Ok(g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let sub = MatchingPolynomial { coeffs: memo.poly(all & !(1 << u) & !(1 << v)) };
            (z.ln() + sub.ln_eval(z) - ln_p).exp()
        })
        .collect())
}

/// `Φ_G(z) = ln P_G(z)`.
pub fn exact_free_entropy<T: Scalar>(g: &Graph, z: T) -> Result<T> {
    bp::check_z(z)?;
    Ok(matching_polynomial(g)?.ln_eval(z))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopTerm<T> {
    /// Edge ids of the generalized loop, ascending.
    pub edges: Vec<usize>,
    pub contribution: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopSeries<T> {
    /// `Z = 1 + Σ_F term(F)`.
    pub z_value: T,
    /// Nonempty generalized loops in enumeration order.
    pub terms: Vec<LoopTerm<T>>,
    /// `(k, 1 + Σ_{|F|≤k} term(F))` for each loop size `k` present.
    pub partial_sums: Vec<(usize, T)>,
}

impl<T: Scalar> LoopSeries<T> {
    /// The `k` terms of largest magnitude, ties kept in enumeration order.
    pub fn top_terms(&self, k: usize) -> Vec<&LoopTerm<T>> {
        let mut refs: Vec<&LoopTerm<T>> = self.terms.iter().collect();
        refs.sort_by(|a, b| b.contribution.abs().partial_cmp(&a.contribution.abs()).unwrap_or(std::cmp::Ordering::Equal));
        refs.truncate(k);
        refs
    }
}

struct LoopSearch<'a, T> {
    g: &'a Graph,
    ratio: Vec<T>,
    remaining: Vec<usize>,
    deg: Vec<usize>,
    chosen: Vec<usize>,
    terms: Vec<LoopTerm<T>>,
}

impl<T: Scalar> LoopSearch<'_, T> {
    fn visit(&mut self, k: usize) {
        if k == self.g.n_edges() {
            if !self.chosen.is_empty() {
                self.record();
            }
            return;
        }
        let (u, v) = self.g.edge(k);
        self.remaining[u] -= 1;
        self.remaining[v] -= 1;
        for take in [false, true] {
            if take {
                self.deg[u] += 1;
                self.deg[v] += 1;
                self.chosen.push(k);
            }
            let stranded = |w: usize, s: &Self| s.remaining[w] == 0 && s.deg[w] == 1;
            if !stranded(u, self) && !stranded(v, self) {
                self.visit(k + 1);
            }
            if take {
                self.deg[u] -= 1;
                self.deg[v] -= 1;
                self.chosen.pop();
            }
        }
        self.remaining[u] += 1;
        self.remaining[v] += 1;
    }

    fn record(&mut self) {
        let mut covered = 0usize;
        let mut weight = T::one();
        for &d in &self.deg {
            if d > 0 {
                covered += 1;
                weight = weight * T::of_usize(d - 1);
            }
        }
        for &e in &self.chosen {
            weight = weight * self.ratio[e];
        }
        if covered % 2 == 1 {
            weight = -weight;
        }
        self.terms.push(LoopTerm { edges: self.chosen.clone(), contribution: weight });
    }
}

/// `Z = 1 + Σ_{F} (−1)^{V(F)} Π_{v covered by F} (d_F(v) − 1) Π_{e∈F} x_e/(1−x_e)`
/// over nonempty generalized loops `F` (no vertex of `F`-degree one).
pub fn loop_series<T: Scalar>(g: &Graph, x: &FractionalMatching<T>, max_edges: usize) -> Result<LoopSeries<T>> {
    if g.n_edges() > max_edges {
        return Err(Error::CapExceeded { what: "edges for loop enumeration", size: g.n_edges(), cap: max_edges });
    }
    check_fm(g, x)?;
    check_interior(x)?;
    let mut search = LoopSearch {
        g,
        ratio: x.x.iter().map(|&v| v / (T::one() - v)).collect(),
        remaining: (0..g.n_vertices()).map(|v| g.degree(v)).collect(),
        deg: vec![0; g.n_vertices()],
        chosen: Vec::new(),
        terms: Vec::new(),
    };
    search.visit(0);
    let terms = search.terms;

    let mut by_size: Vec<(usize, T)> = Vec::new();
    for t in &terms {
        let k = t.edges.len();
        match by_size.iter_mut().find(|(s, _)| *s == k) {
            Some(slot) => slot.1 = slot.1 + t.contribution,
            None => by_size.push((k, t.contribution)),
        }
    }
    by_size.sort_by_key(|&(k, _)| k);
    let mut running = T::one();
    let partial_sums: Vec<(usize, T)> = by_size
        .into_iter()
        .map(|(k, s)| {
            running = running + s;
            (k, running)
        })
        .collect();
    let z_value = T::one() + terms.iter().fold(T::zero(), |a, t| a + t.contribution);
    Ok(LoopSeries { z_value, terms, partial_sums })
}

fn for_each_matching(g: &Graph, mut visit: impl FnMut(&[bool])) {
    fn rec(g: &Graph, k: usize, used: &mut [bool], b: &mut [bool], visit: &mut dyn FnMut(&[bool])) {
        if k == g.n_edges() {
            visit(b);
            return;
        }
        rec(g, k + 1, used, b, visit);
        let (u, v) = g.edge(k);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            b[k] = true;
            rec(g, k + 1, used, b, visit);
            b[k] = false;
            used[u] = false;
            used[v] = false;
        }
    }
    let mut used = vec![false; g.n_vertices()];
    let mut b = vec![false; g.n_edges()];
    rec(g, 0, &mut used, &mut b, &mut visit);
}

/// `Π_v μ_{∂v}(B_{∂v}) / Π_e μ_e(B_e)` for a matching `B`.
fn reparam_weight<T: Scalar>(g: &Graph, x: &[T], s: &[T], b: &[bool]) -> T {
    let mut w = T::one();
    for v in 0..g.n_vertices() {
        let mut local = T::one();
        let mut ones = 0;
        for d in g.out_edges(v) {
            let e = Graph::undirected(d);
            if b[e] {
                ones += 1;
                local = local * x[e];
            }
        }
        if ones == 0 {
            local = T::one() - s[v];
        }
        w = w * local;
    }
    for (e, &be) in b.iter().enumerate() {
        w = w / if be { x[e] } else { T::one() - x[e] };
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReparamCheck<T> {
    /// `max_B |μ_rep(B) − μ^z(B)|` over all matchings.
    pub deviation: T,
    /// Normalising constant of the reparameterised weights.
    pub z_value: T,
}

/// Enumerates all matchings and compares the Gibbs measure with the
/// normalised product of local marginals built from `x(z)`.
pub fn reparameterization_check<T: Scalar>(g: &Graph, z: T, cfg: &LabpConfig<T>) -> Result<ReparamCheck<T>> {
    if g.n_edges() > REPARAM_CAP {
        return Err(Error::CapExceeded { what: "edges for the reparameterization check", size: g.n_edges(), cap: REPARAM_CAP });
    }
    let run = bp::run_labp(g, z, cfg)?;
    let x = bp::x_of_z(g, z, &run.y, T::of(FM_TOL))?;
    reparameterization_deviation(g, z, &x)
}

/// As [`reparameterization_check`] with a given `x`.
pub fn reparameterization_deviation<T: Scalar>(g: &Graph, z: T, x: &FractionalMatching<T>) -> Result<ReparamCheck<T>> {
    if g.n_edges() > REPARAM_CAP {
        return Err(Error::CapExceeded { what: "edges for the reparameterization check", size: g.n_edges(), cap: REPARAM_CAP });
    }
    bp::check_z(z)?;
    check_fm(g, x)?;
    check_interior(x)?;
    let s = loads(g, x);
    let mut weights = Vec::new();
    let mut gibbs = Vec::new();
    for_each_matching(g, |b| {
        weights.push(reparam_weight(g, &x.x, &s, b));
        gibbs.push(z.powi(b.iter().filter(|&&t| t).count() as i32));
    });
    let z_value = weights.iter().fold(T::zero(), |a, &w| a + w);
    let p = gibbs.iter().fold(T::zero(), |a, &w| a + w);
    let deviation = weights
        .iter()
        .zip(&gibbs)
        .fold(T::zero(), |a, (&w, &q)| a.max((w / z_value - q / p).abs()));
    Ok(ReparamCheck { deviation, z_value })
}

/// Largest mismatch, over vertices `v` and local configurations with at most
/// one occupied edge, between `μ_{∂v}(B) / Π_{e∈∂v} μ_e(B_e)` and
/// `1 − Σ_{∅≠S⊆∂v} (−1)^{|S|} (|S|−1) Π_{e∈S} (B_e − x_e)/(1 − x_e)`.
pub fn local_ratio_deviation<T: Scalar>(g: &Graph, x: &FractionalMatching<T>) -> Result<T> {
    check_fm(g, x)?;
    check_interior(x)?;
    if g.max_degree() > 20 {
        return Err(Error::CapExceeded { what: "degree for subset expansion", size: g.max_degree(), cap: 20 });
    }
    let mut worst = T::zero();
    for v in 0..g.n_vertices() {
        let es: Vec<usize> = g.out_edges(v).map(Graph::undirected).collect();
        let xs: Vec<T> = es.iter().map(|&e| x.x[e]).collect();
        let sv = xs.iter().fold(T::zero(), |a, &b| a + b);
        for occupied in std::iter::once(None).chain((0..es.len()).map(Some)) {
            let b: Vec<T> = (0..es.len()).map(|i| if Some(i) == occupied { T::one() } else { T::zero() }).collect();
            let mut lhs = match occupied {
                Some(i) => xs[i],
                None => T::one() - sv,
            };
            for i in 0..es.len() {
                lhs = lhs / if Some(i) == occupied { xs[i] } else { T::one() - xs[i] };
            }
            let mut rhs = T::one();
            for mask in 1u32..(1 << es.len()) {
                let size = mask.count_ones() as usize;
                let mut prod = T::of_usize(size) - T::one();
                for i in 0..es.len() {
                    if mask >> i & 1 == 1 {
                        prod = prod * (b[i] - xs[i]) / (T::one() - xs[i]);
                    }
                }
                rhs = if size % 2 == 0 { rhs - prod } else { rhs + prod };
            }
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheReport<T> {
    pub z: T,
    pub x: FractionalMatching<T>,
    /// `U^B = −Σ_e x_e`.
    pub u_b: T,
    pub s_b: T,
    pub phi_b: T,
    /// `ln P_G(z)` when within [`POLY_CAP`].
    pub phi_exact: Option<T>,
    /// Loop-series `Z` when requested and within the loop cap.
    pub loops: Option<LoopSeries<T>>,
    pub envelope_gap: T,
    pub termination: bp::Termination,
}

impl<T: Scalar> BetheReport<T> {
    pub fn ln_z(&self) -> Option<T> {
        self.loops.as_ref().map(|l| l.z_value.ln())
    }

    /// `|ln Z − (Φ_G − Φ^B)|`.
    pub fn residual(&self) -> Option<T> {
        Some((self.ln_z()? - (self.phi_exact? - self.phi_b)).abs())
    }
}

/// Runs LABP at `z` and evaluates the Bethe quantities at `x(z)`. The exact
/// free entropy is included whenever the graph is within [`POLY_CAP`]; the
/// loop series only when `loop_cap` is given and respected.
pub fn bethe_report<T: Scalar>(g: &Graph, z: T, cfg: &LabpConfig<T>, loop_cap: Option<usize>) -> Result<BetheReport<T>> {
    let run = bp::run_labp(g, z, cfg)?;
    let x = bp::x_of_z(g, z, &run.y, T::of(FM_TOL) + T::of(4.0) * run.relative_gap())?.repaired(g);
    let s_b = bethe_entropy(g, &x)?;
    let phi_b = x.value() * z.ln() + s_b;
    let phi_exact = if g.n_edges() <= POLY_CAP && g.n_vertices() <= 64 { Some(exact_free_entropy(g, z)?) } else { None };
    let loops = match loop_cap {
        Some(cap) if g.n_edges() <= cap => Some(loop_series(g, &x, cap)?),
        _ => None,
    };
    Ok(BetheReport {
        z,
        u_b: bethe_energy(&x),
        s_b,
        phi_b,
        x,
        phi_exact,
        loops,
        envelope_gap: run.envelope.gap,
        termination: run.termination,
    })
}
