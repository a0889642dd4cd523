//! Zero-temperature limit.
//!
//! As `z → ∞` the messages `Y(z)` increase to the smallest fixed point of
//! `Q ∘ R` over `[0, ∞]`. The pattern of infinite entries `I^Y` is a fixed
//! point of the boolean map `℘ ∘ ℘`, and `F_v(I^Y) / 2` is a minimum
//! half-integral vertex cover, whose value is the fractional matching number.
//!
//! Divergence has no finite-time test, so entries above a bound are promoted
//! to `∞` and the resulting pattern is accepted only once it is an exact
//! `℘ ∘ ℘` fixed point and its cover passes an LP duality check against an
//! annealed primal.

use std::cmp::Ordering;
use std::fmt;

use crate::bp::{self, FractionalMatching, LabpConfig};
use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph, Side, Vertex};
use crate::half::HalfInt;
use crate::scalar::Scalar;

/// An element of `[0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Ext<T> {
    pub fn is_infinite(self) -> bool {
        matches!(self, Ext::Infinite)
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinite => None,
        }
    }

    /// `1 / v` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(v: T) -> Self {
        if v == T::zero() {
            Ext::Infinite
        } else {
            Ext::Finite(T::one() / v)
        }
    }
}

impl<T: Scalar> PartialOrd for Ext<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Ext::Infinite, Ext::Infinite) => Some(Ordering::Equal),
            (Ext::Infinite, Ext::Finite(_)) => Some(Ordering::Greater),
            (Ext::Finite(_), Ext::Infinite) => Some(Ordering::Less),
            (Ext::Finite(a), Ext::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> fmt::Display for Ext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::Infinite => f.write_str("inf"),
        }
    }
}

/// One value in `[0, ∞]` per directed edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtMessages<T>(pub Vec<Ext<T>>);

impl<T: Scalar> ExtMessages<T> {
    pub fn zeros(g: &Graph) -> Self {
        ExtMessages(vec![Ext::Finite(T::zero()); g.n_directed()])
    }

    pub fn infinities(&self) -> BoolMsgVec {
        BoolMsgVec(self.0.iter().map(|v| v.is_infinite()).collect())
    }

    /// Componentwise `self ≤ other` in the extended order.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// One bit per directed edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolMsgVec(pub Vec<bool>);

impl BoolMsgVec {
    pub fn zeros(g: &Graph) -> Self {
        BoolMsgVec(vec![false; g.n_directed()])
    }

    pub fn ones(g: &Graph) -> Self {
        BoolMsgVec(vec![true; g.n_directed()])
    }

    /// Bit `d` of `mask` becomes message `d`.
    pub fn from_mask(g: &Graph, mask: u64) -> Self {
        BoolMsgVec((0..g.n_directed()).map(|d| mask >> d & 1 == 1).collect())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

/// `R(Y)[u→v] = 1 / (1 + Σ_{w∈∂u∖v} Y[w→u])`, and `0` if any summand is `∞`.
pub fn ext_r<T: Scalar>(g: &Graph, y: &ExtMessages<T>) -> ExtMessages<T> {
    let out = g.exclusive_map(
        (T::zero(), false),
        |d| match y.0[d] {
            Ext::Finite(v) => (v, false),
            Ext::Infinite => (T::zero(), true),
        },
        |a, b| (a.0 + b.0, a.1 || b.1),
        |(s, inf)| if inf { T::zero() } else { T::one() / (T::one() + s) },
    );
    ExtMessages(out.into_iter().map(Ext::Finite).collect())
}

/// `Q(X)[u→v] = 1 / Σ_{w∈∂u∖v} X[w→u]`, with `1/0 = ∞` and `1/∞ = 0`.
pub fn ext_q<T: Scalar>(g: &Graph, x: &ExtMessages<T>) -> ExtMessages<T> {
    let out = g.exclusive_map(
        (T::zero(), false),
        |d| match x.0[d] {
            Ext::Finite(v) => (v, false),
            Ext::Infinite => (T::zero(), true),
        },
        |a, b| (a.0 + b.0, a.1 || b.1),
        |(s, inf)| if inf { (T::zero(), false) } else { (s, s == T::zero()) },
    );
    ExtMessages(
        out.into_iter()
            .map(|(s, inf)| if inf { Ext::Infinite } else if s == T::zero() { Ext::Finite(T::zero()) } else { Ext::recip(s) })
            .collect(),
    )
}

/// Extended `D_v`: `1` if some message into `v` is infinite, else `S/(1+S)`.
pub fn ext_d_v<T: Scalar>(g: &Graph, y: &ExtMessages<T>, v: Vertex) -> T {
    let mut s = T::zero();
    for d in g.in_edges(v) {
        match y.0[d] {
            Ext::Infinite => return T::one(),
            Ext::Finite(m) => s = s + m,
        }
    }
    s / (T::one() + s)
}

/// `℘(I)[u→v] = 1` iff `Σ_{w∈∂u∖v} I[w→u] = 0`.
pub fn p_map(g: &Graph, i: &BoolMsgVec) -> BoolMsgVec {
    BoolMsgVec(g.exclusive_map(false, |d| i.0[d], |a, b| a || b, |any| !any))
}

pub fn is_pp_fixed(g: &Graph, i: &BoolMsgVec) -> bool {
    p_map(g, &p_map(g, i)) == *i
}

/// `F_v(I) = min(1, Σ_{u∈∂v} I[u→v]) + max(0, 1 − Σ_{u∈∂v} I[v→u])`.
pub fn f_v(g: &Graph, i: &BoolMsgVec, v: Vertex) -> u8 {
    let incoming = g.in_edges(v).any(|d| i.0[d]);
    let outgoing = g.out_edges(v).any(|d| i.0[d]);
    u8::from(incoming) + u8::from(!outgoing)
}

pub fn f_sum(g: &Graph, i: &BoolMsgVec) -> usize {
    (0..g.n_vertices()).map(|v| f_v(g, i, v) as usize).sum()
}

/// Vertex weights in `{0, 1/2, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralCover {
    pub y: Vec<HalfInt>,
}

impl HalfIntegralCover {
    pub fn value(&self) -> HalfInt {
        self.y.iter().copied().sum()
    }

    pub fn is_feasible(&self, g: &Graph) -> bool {
        self.y.len() == g.n_vertices()
            && self.y.iter().all(|y| (0..=2).contains(&y.twice()))
            && g.edges().iter().all(|&(u, v)| self.y[u].twice() + self.y[v].twice() >= 2)
    }

    /// Vertices with `y_v > 0`; a 2-approximate vertex cover.
    pub fn rounded(&self) -> VertexCover {
        VertexCover { in_cover: self.y.iter().map(|y| y.twice() > 0).collect() }
    }

    pub fn half_count(&self) -> usize {
        self.y.iter().filter(|y| y.twice() == 1).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    pub in_cover: Vec<bool>,
}

impl VertexCover {
    pub fn size(&self) -> usize {
        self.in_cover.iter().filter(|&&b| b).count()
    }

    pub fn is_feasible(&self, g: &Graph) -> bool {
        self.in_cover.len() == g.n_vertices() && g.edges().iter().all(|&(u, v)| self.in_cover[u] || self.in_cover[v])
    }

    pub fn members(&self) -> Vec<Vertex> {
        (0..self.in_cover.len()).filter(|&v| self.in_cover[v]).collect()
    }
}

/// `y_v = F_v(I) / 2`. Requires `I = ℘(℘(I))`.
pub fn half_cover(g: &Graph, i: &BoolMsgVec) -> Result<HalfIntegralCover> {
    if i.0.len() != g.n_directed() || !is_pp_fixed(g, i) {
        return Err(Error::ContractViolation("messages are not a fixed point of the double max-product map".into()));
    }
    let cover = HalfIntegralCover { y: (0..g.n_vertices()).map(|v| HalfInt::from_twice(f_v(g, i, v) as i64)).collect() };
    if !cover.is_feasible(g) {
        return Err(Error::Certification("F_v / 2 is not a vertex cover".into()));
    }
    Ok(cover)
}

/// `max(1e6, |V|² · max degree)`.
pub fn default_divergence_bound(g: &Graph) -> f64 {
    let n = g.n_vertices() as f64;
    (n * n * g.max_degree() as f64).max(1e6)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint<T> {
    pub y: ExtMessages<T>,
    pub i_y: BoolMsgVec,
    /// `T = Q ∘ R` applications performed.
    pub rounds: usize,
    /// Stopped on stationarity rather than on `max_rounds`.
    pub stationary: bool,
    /// `I_Y = ℘(℘(I_Y))`.
    pub pp_fixed: bool,
    /// Rounds in which some entry decreased.
    pub monotone_violations: usize,
    pub bound: f64,
}

const STATIONARY_TOL: f64 = 1e-12;

/// Iterates `Y ← Q(R(Y))` from zero, promoting entries above `bound` to `∞`,
/// until finite entries move by at most `1e-12` and the `∞` pattern has not
/// changed for two rounds.
pub fn smallest_fixed_point<T: Scalar>(g: &Graph, bound: f64, max_rounds: usize) -> Result<FixedPoint<T>> {
    if !(bound > 1.0) {
        return Err(Error::InvalidArgument { arg: "divergence_bound", reason: format!("{bound} is not > 1") });
    }
    // IEEE arithmetic implements the conventions: y + ∞ = ∞, 1/(1+∞) = 0, 1/0 = ∞.
    let m = g.n_directed();
    let cap = T::of(bound);
    let tol = T::of(STATIONARY_TOL);
    let mut y = vec![T::zero(); m];
    let mut x = vec![T::zero(); m];
    let mut next = vec![T::zero(); m];
    let mut scratch = Vec::new();
    let mut stable = 0;
    let mut pattern_rounds = 0;
    let mut rounds = 0;
    let mut violations = 0;

    while rounds < max_rounds && stable < 2 {
        g.exclusive_map_into(T::zero(), |d| y[d], |a, b| a + b, |s| T::one() / (T::one() + s), &mut scratch, &mut x);
        g.exclusive_map_into(
            T::zero(),
            |d| x[d],
            |a, b| a + b,
            |s| {
                let v = T::one() / s;
                if v > cap {
                    T::infinity()
                } else {
                    v
                }
            },
            &mut scratch,
            &mut next,
        );
        rounds += 1;

        let mut pattern_same = true;
        let mut finite_same = true;
        let mut decreased = false;
        for (old, &new) in y.iter_mut().zip(&next) {
            if old.is_infinite() != new.is_infinite() {
                pattern_same = false;
                decreased |= old.is_infinite();
            } else if !new.is_infinite() {
                decreased |= new < *old;
                finite_same &= (new - *old).abs() <= tol;
            }
            *old = new;
        }
        if decreased {
            violations += 1;
        }
        pattern_rounds = if pattern_same { pattern_rounds + 1 } else { 0 };
        stable = if finite_same { pattern_rounds } else { 0 };
    }

    let values = ExtMessages(y.iter().map(|&v| if v.is_infinite() { Ext::Infinite } else { Ext::Finite(v) }).collect());
    let inf: Vec<bool> = y.iter().map(|v| v.is_infinite()).collect();
    let i_y = BoolMsgVec(inf);
    let pp_fixed = is_pp_fixed(g, &i_y);
    Ok(FixedPoint { y: values, i_y, rounds, stationary: stable >= 2, pp_fixed, monotone_violations: violations, bound })
}

/// `I^X[d] = 1(R(Y)[d] > 0)`.
pub fn i_x<T: Scalar>(g: &Graph, y: &ExtMessages<T>) -> BoolMsgVec {
    BoolMsgVec(ext_r(g, y).0.iter().map(|v| *v > Ext::Finite(T::zero())).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityCertificate {
    pub primal: f64,
    pub dual: HalfInt,
    /// `dual − primal`.
    pub gap: f64,
    pub gap_tol: f64,
    pub passed: bool,
}

/// Primal feasibility slack accepted by [`certify_optimal`].
pub const PRIMAL_FEAS_TOL: f64 = 1e-9;

/// Compares a feasible fractional matching with a feasible half-integral
/// cover. Passes iff `dual − primal ≤ gap_tol` and, when the gap is below
/// `1/4`, the dual is the half-integer nearest to the primal.
pub fn certify_optimal<T: Scalar>(
    g: &Graph,
    primal: &FractionalMatching<T>,
    dual: &HalfIntegralCover,
    gap_tol: f64,
) -> Result<DualityCertificate> {
    if !primal.is_feasible(g, T::of(PRIMAL_FEAS_TOL)) {
        return Err(Error::Infeasible(format!(
            "primal leaves the fractional matching polytope by {}",
            primal.infeasibility(g)
        )));
    }
    if !dual.is_feasible(g) {
        return Err(Error::Infeasible("dual is not a half-integral vertex cover".into()));
    }
    let p = primal.value().as_f64();
    let d = dual.value();
    let gap = d.to_f64() - p;
    if gap < -PRIMAL_FEAS_TOL * (1.0 + g.n_edges() as f64) {
        return Err(Error::WeakDuality { primal: p, dual: d.to_f64() });
    }
    let passed = gap <= gap_tol && (gap >= 0.25 || HalfInt::nearest(p) == d);
    Ok(DualityCertificate { primal: p, dual: d, gap, gap_tol, passed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial promotion bound; `None` selects [`default_divergence_bound`].
    pub divergence_bound: Option<f64>,
    pub max_rounds: usize,
    /// Times the bound is squared after a failed certification.
    pub max_retries: usize,
    pub gap_tol: f64,
    pub ladder: Vec<f64>,
    pub labp: LabpConfig<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            divergence_bound: None,
            max_rounds: 10_000_000,
            max_retries: 2,
            gap_tol: 0.25,
            ladder: bp::default_ladder(),
            labp: LabpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    /// `Σ_v F_v(I^Y) / 2`, present when some attempt produced a `℘∘℘` fixed point.
    pub nu_star: Option<HalfInt>,
    pub cover: Option<HalfIntegralCover>,
    pub fixed_point: FixedPoint<T>,
    /// Annealed fractional matching, scaled to be exactly feasible.
    pub primal: FractionalMatching<T>,
    pub certificate: Option<DualityCertificate>,
    pub attempts: usize,
    pub certified: bool,
    pub diagnostic: Option<String>,
}

/// Full zero-temperature pipeline with self-certification.
pub fn solve<T: Scalar>(g: &Graph, cfg: &SolverConfig) -> Result<Solution<T>> {
    check_solvable(g)?;
    let ladder: Vec<T> = cfg.ladder.iter().map(|&z| T::of(z)).collect();
    let labp = LabpConfig { tol: T::of(cfg.labp.tol.as_f64()), max_rounds: cfg.labp.max_rounds };
    let steps = bp::anneal(g, &ladder, &labp)?;
    let primal = steps.last().expect("ladder is nonempty").x.repaired(g);
    solve_with_primal(g, primal, cfg)
}

/// As [`solve`], certifying against a caller-supplied primal.
pub fn solve_with_primal<T: Scalar>(g: &Graph, primal: FractionalMatching<T>, cfg: &SolverConfig) -> Result<Solution<T>> {
    check_solvable(g)?;
    let mut bound = cfg.divergence_bound.unwrap_or_else(|| default_divergence_bound(g));
    let mut last = None;
    let mut diagnostic = String::new();
    for attempt in 1..=cfg.max_retries + 1 {
        let fp = smallest_fixed_point::<T>(g, bound, cfg.max_rounds)?;
        let mut nu = None;
        let mut cover = None;
        let mut cert = None;
        if !fp.stationary {
            diagnostic = format!("no stationarity after {} rounds at bound {bound:e}", fp.rounds);
        } else if !fp.pp_fixed {
            diagnostic = format!("infinity pattern at bound {bound:e} is not a double max-product fixed point");
        } else {
            let c = half_cover(g, &fp.i_y)?;
            let certificate = certify_optimal(g, &primal, &c, cfg.gap_tol)?;
            nu = Some(c.value());
            if certificate.passed {
                return Ok(Solution {
                    nu_star: nu,
                    cover: Some(c),
                    fixed_point: fp,
                    primal,
                    certificate: Some(certificate),
                    attempts: attempt,
                    certified: true,
                    diagnostic: None,
                });
            }
            diagnostic = format!("duality gap {} exceeds tolerance {} at bound {bound:e}", certificate.gap, cfg.gap_tol);
            cover = Some(c);
            cert = Some(certificate);
        }
        last = Some((fp, nu, cover, cert, attempt));
        bound *= bound;
        if !bound.is_finite() {
            break;
        }
    }
    let (fp, nu_star, cover, certificate, attempts) = last.expect("at least one attempt");
    Ok(Solution {
        nu_star,
        cover,
        fixed_point: fp,
        primal,
        certificate,
        attempts,
        certified: false,
        diagnostic: Some(diagnostic),
    })
}

fn check_solvable(g: &Graph) -> Result<()> {
    if g.n_edges() == 0 {
        return Err(Error::InvalidGraph("graph has no edges".into()));
    }
    if let Some(v) = g.isolated_vertex() {
        return Err(Error::IsolatedVertex(v));
    }
    Ok(())
}

/// Certified fractional matching number.
pub fn nu_star(g: &Graph) -> Result<HalfInt> {
    let sol = solve::<f64>(g, &SolverConfig::default())?;
    match (sol.certified, sol.nu_star) {
        (true, Some(v)) => Ok(v),
        _ => Err(Error::Certification(sol.diagnostic.unwrap_or_else(|| "uncertified".into()))),
    }
}

/// `V(I)` for one labelling: `u ∈ U` is in iff some message into `u` is
/// one; `w ∈ W` is in iff at least two messages into `w` are one under
/// `℘(I)`.
pub fn v_of_i(g: &Graph, b: &Bipartition, i: &BoolMsgVec) -> VertexCover {
    let p = p_map(g, i);
    VertexCover {
        in_cover: (0..g.n_vertices())
            .map(|v| match b.side[v] {
                Side::U => g.in_edges(v).any(|d| i.0[d]),
                Side::W => g.in_edges(v).filter(|&d| p.0[d]).count() >= 2,
            })
            .collect(),
    }
}

/// Minimum vertex cover of a bipartite graph from a certified `I^Y`.
/// Both labellings are tried; the smaller feasible cover wins, ties going
/// to `b`. The size must equal `Σ_v F_v(I) / 2`.
pub fn bipartite_cover(g: &Graph, b: &Bipartition, i: &BoolMsgVec) -> Result<VertexCover> {
    if !b.is_valid_for(g) {
        return Err(Error::InvalidArgument { arg: "bipartition", reason: "an edge joins two vertices on the same side".into() });
    }
    let f = f_sum(g, i);
    let best = [v_of_i(g, b, i), v_of_i(g, &b.swapped(), i)]
        .into_iter()
        .filter(|c| c.is_feasible(g))
        .min_by_key(|c| c.size())
        .ok_or_else(|| Error::Certification("V(I) is not a vertex cover under either labelling".into()))?;
    if 2 * best.size() != f {
        return Err(Error::Certification(format!("|V(I)| = {} but sum of F_v / 2 = {}", best.size(), f as f64 / 2.0)));
    }
    Ok(best)
}

/// Bipartition-and-solve convenience: the certified minimum vertex cover.
pub fn min_vertex_cover_bipartite(g: &Graph, cfg: &SolverConfig) -> Result<(VertexCover, Solution<f64>)> {
    let b = g.bipartition().ok_or_else(|| Error::NotBipartite { cycle: g.odd_cycle().unwrap_or_default() })?;
    let sol = solve::<f64>(g, cfg)?;
    if !sol.certified {
        return Err(Error::Certification(sol.diagnostic.clone().unwrap_or_default()));
    }
    let cover = bipartite_cover(g, &b, &sol.fixed_point.i_y)?;
    Ok((cover, sol))
}
