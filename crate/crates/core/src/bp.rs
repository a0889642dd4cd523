//! Finite-temperature LABP.
//!
//! The synchronous update `m[u→v] ← z / (1 + Σ_{w∈∂u∖v} m[w→u])` is
//! antitone, so starting from zero its even iterates increase and its odd
//! iterates decrease, squeezing the unique fixed point `Y(z)` between them.
//! [`run_labp`] tracks both envelopes and stops on their gap, which makes
//! every reported `Y(z)` an interval with a certified radius.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::scalar::Scalar;

/// Largest accepted temperature parameter.
pub const Z_MAX: f64 = 1e300;

/// One nonnegative finite value per directed edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Messages<T>(pub Vec<T>);

impl<T: Scalar> Messages<T> {
    pub fn zeros(g: &Graph) -> Self {
        Messages(vec![T::zero(); g.n_directed()])
    }

    pub fn constant(g: &Graph, c: T) -> Self {
        Messages(vec![c; g.n_directed()])
    }

    pub fn max_entry(&self) -> T {
        self.0.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Messages<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// One synchronous LABP round at temperature `z`.
pub fn bp_update<T: Scalar>(g: &Graph, z: T, m: &Messages<T>) -> Messages<T> {
    Messages(g.exclusive_map(T::zero(), |d| m[d], |a, b| a + b, |s| z / (T::one() + s)))
}

/// The cavity map `R(m)[u→v] = 1 / (1 + Σ_{w∈∂u∖v} m[w→u])`, i.e. the
/// update at `z = 1`.
pub fn cavity<T: Scalar>(g: &Graph, m: &Messages<T>) -> Messages<T> {
    bp_update(g, T::one(), m)
}

pub(crate) fn check_z<T: Scalar>(z: T) -> Result<()> {
    let zf = z.as_f64();
    if !(zf > 0.0) || !zf.is_finite() || zf > Z_MAX {
        return Err(Error::InvalidArgument {
            arg: "z",
            reason: format!("{zf} is not in (0, {Z_MAX:e}]"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabpConfig<T> {
    /// Relative envelope gap at which the run stops.
    pub tol: T,
    /// Cap on the number of `bp_update` applications.
    pub max_rounds: usize,
}

impl<T: Scalar> Default for LabpConfig<T> {
    fn default() -> Self {
        LabpConfig { tol: T::of(1e-12), max_rounds: 1_000_000 }
    }
}

/// Even (`lower`) and odd (`upper`) iterates bracketing `Y(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<T> {
    pub lower: Messages<T>,
    pub upper: Messages<T>,
    /// Number of `bp_update` applications performed.
    pub rounds: usize,
    /// `max_d (upper[d] − lower[d])`.
    pub gap: T,
    /// Rounds in which a new iterate left the previous bracket by more than
    /// rounding slack. Always zero in exact arithmetic.
    pub sandwich_violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Gap fell below `tol · max(1, max entry)`.
    Converged,
    /// Neither envelope moved during a full round: floating point cannot
    /// tighten the bracket any further, and the gap is still above `tol`.
    Stalled,
    MaxRounds,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::Stalled => "stalled",
            Termination::MaxRounds => "max-rounds",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabpRun<T> {
    pub z: T,
    /// Envelope midpoint.
    pub y: Messages<T>,
    pub envelope: Envelope<T>,
    pub termination: Termination,
}

impl<T: Scalar> LabpRun<T> {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// Certified bound on `|y[d] − Y(z)[d]|`.
    pub fn error_bound(&self) -> T {
        self.envelope.gap / T::of(2.0)
    }

    /// Gap relative to `max(1, max entry)`, the quantity compared to `tol`.
    pub fn relative_gap(&self) -> T {
        self.envelope.gap / T::one().max(self.envelope.upper.max_entry())
    }
}

/// Runs LABP from `m⁰ ≡ 0`.
pub fn run_labp<T: Scalar>(g: &Graph, z: T, cfg: &LabpConfig<T>) -> Result<LabpRun<T>> {
    check_z(z)?;
    Ok(iterate(g, z, cfg, Messages::zeros(g), None))
}

/// Runs LABP with the even envelope started at `start`, provided `start` is
/// a valid even iterate at `z` (`start ≤ f(f(start))`); otherwise restarts
/// from zero. The flag reports whether the warm start was used.
pub fn run_labp_warm<T: Scalar>(
    g: &Graph,
    z: T,
    cfg: &LabpConfig<T>,
    start: &Messages<T>,
) -> Result<(LabpRun<T>, bool)> {
    check_z(z)?;
    let odd = bp_update(g, z, start);
    let even = bp_update(g, z, &odd);
    if start.len() == g.n_directed() && start.le(&even) && even.le(&odd) {
        Ok((iterate(g, z, cfg, start.clone(), Some(odd)), true))
    } else {
        Ok((iterate(g, z, cfg, Messages::zeros(g), None), false))
    }
}

fn iterate<T: Scalar>(
    g: &Graph,
    z: T,
    cfg: &LabpConfig<T>,
    mut lower: Messages<T>,
    upper: Option<Messages<T>>,
) -> LabpRun<T> {
    let slack_factor = T::epsilon() * T::of(4096.0);
    let slack = |v: T| slack_factor * T::one().max(v.abs());
    let mut upper = upper.unwrap_or_else(|| bp_update(g, z, &lower));
    let mut rounds = 1;
    let mut violations = 0;

    let termination = loop {
        let gap = gap_of(&lower, &upper);
        if gap <= cfg.tol * T::one().max(upper.max_entry()) {
            break Termination::Converged;
        }
        if rounds + 2 > cfg.max_rounds {
            break Termination::MaxRounds;
        }
        let mut next_lower = bp_update(g, z, &upper);
        let mut next_upper = bp_update(g, z, &next_lower);
        rounds += 2;

        let mut bad = false;
        for d in 0..lower.len() {
            let (l0, u0) = (lower[d], upper[d]);
            let (l1, u1) = (next_lower.0[d], next_upper.0[d]);
            if l1 < l0 - slack(l0) || u1 > u0 + slack(u0) || l1 > u1 + slack(u1) {
                bad = true;
            }
            next_lower.0[d] = l1.max(l0);
            next_upper.0[d] = u1.min(u0).max(next_lower.0[d]);
        }
        if bad {
            violations += 1;
        }
        if next_lower == lower && next_upper == upper {
            break Termination::Stalled;
        }
        lower = next_lower;
        upper = next_upper;
    };

    let gap = gap_of(&lower, &upper);
    let two = T::of(2.0);
    let y = Messages(lower.iter().zip(upper.iter()).map(|(&l, &u)| l + (u - l) / two).collect());
    LabpRun {
        z,
        y,
        envelope: Envelope { lower, upper, rounds, gap, sandwich_violations: violations },
        termination,
    }
}

fn gap_of<T: Scalar>(lower: &Messages<T>, upper: &Messages<T>) -> T {
    lower.iter().zip(upper.iter()).fold(T::zero(), |g, (&l, &u)| g.max(u - l))
}

/// `max_d |y[d] − (z R(y))[d]|`.
pub fn fixed_point_residual<T: Scalar>(g: &Graph, z: T, y: &Messages<T>) -> T {
    let next = bp_update(g, z, y);
    y.iter().zip(next.iter()).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
}

/// Edge weights `x_e`, one per undirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalMatching<T> {
    pub x: Vec<T>,
}

impl<T: Scalar> FractionalMatching<T> {
    pub fn value(&self) -> T {
        self.x.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// `Σ_{e∈∂v} x_e`.
    pub fn load(&self, g: &Graph, v: Vertex) -> T {
        g.out_edges(v).fold(T::zero(), |a, d| a + self.x[Graph::undirected(d)])
    }

    /// Largest violation of `x ≥ 0` or `Σ_{e∈∂v} x_e ≤ 1`; zero when feasible.
    pub fn infeasibility(&self, g: &Graph) -> T {
        let neg = self.x.iter().fold(T::zero(), |a, &x| a.max(-x));
        (0..g.n_vertices()).fold(neg, |a, v| a.max(self.load(g, v) - T::one()))
    }

    pub fn is_feasible(&self, g: &Graph, tol: T) -> bool {
        self.x.len() == g.n_edges() && self.infeasibility(g) <= tol
    }

    /// Scales `x` down just enough to make every vertex load at most one.
    pub fn repaired(&self, g: &Graph) -> Self {
        let worst = (0..g.n_vertices()).fold(T::one(), |a, v| a.max(self.load(g, v)));
        FractionalMatching { x: self.x.iter().map(|&x| (x / worst).max(T::zero())).collect() }
    }
}

/// `x_e = Y[ē]·Y[−ē] / (z + Y[ē]·Y[−ē])`, evaluated as
/// `1 / (1 + (z / Y[ē]) / Y[−ē])` so that huge `z` cannot overflow.
/// Fails when the result leaves `FM(G)` by more than `tol`.
pub fn x_of_z<T: Scalar>(g: &Graph, z: T, y: &Messages<T>, tol: T) -> Result<FractionalMatching<T>> {
    let x = FractionalMatching { x: (0..g.n_edges()).map(|k| edge_weight(z, y[2 * k], y[2 * k + 1])).collect() };
    let bad = x.infeasibility(g);
    if !(bad <= tol) {
        return Err(Error::Numerical(format!(
            "x(z) leaves the fractional matching polytope by {bad} (tolerance {tol})"
        )));
    }
    Ok(x)
}

fn edge_weight<T: Scalar>(z: T, a: T, b: T) -> T {
    if a <= T::zero() || b <= T::zero() {
        return T::zero();
    }
    T::one() / (T::one() + (z / a) / b)
}

/// Tree marginal `Y[ē]·R[−ē](Y) / (1 + Y[ē]·R[−ē](Y))`, computed through
/// the cavity map instead of the closed form used by [`x_of_z`].
pub fn cavity_marginals<T: Scalar>(g: &Graph, y: &Messages<T>) -> Vec<T> {
    let r = cavity(g, y);
    (0..g.n_edges())
        .map(|k| {
            let p = y[2 * k] * r[2 * k + 1];
            p / (T::one() + p)
        })
        .collect()
}

/// `D_v(Y) = S / (1 + S)` with `S` the sum of messages entering `v`.
pub fn d_v<T: Scalar>(g: &Graph, y: &Messages<T>, v: Vertex) -> T {
    let s = g.in_edges(v).fold(T::zero(), |a, d| a + y[d]);
    s / (T::one() + s)
}

/// `z_k = 10^k` for `k = 0..=8`.
pub fn default_ladder<T: Scalar>() -> Vec<T> {
    (0..=8).map(|k| T::of(10f64.powi(k))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealStep<T> {
    pub z: T,
    pub x: FractionalMatching<T>,
    pub value: T,
    pub gap: T,
    pub rounds: usize,
    pub termination: Termination,
    pub warm_started: bool,
    pub sandwich_violations: usize,
}

/// Runs LABP along an increasing ladder of temperatures, warm-starting
/// each rung's even envelope from the previous rung's lower envelope.
/// Since `Y(z)` is nondecreasing in `z`, that envelope is a lower bound
/// at the next rung; it is used only if it is also a valid even iterate.
pub fn anneal<T: Scalar>(g: &Graph, ladder: &[T], cfg: &LabpConfig<T>) -> Result<Vec<AnnealStep<T>>> {
    if ladder.is_empty() || ladder.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument {
            arg: "ladder",
            reason: "temperatures must be nonempty and strictly increasing".into(),
        });
    }
    let mut steps = Vec::with_capacity(ladder.len());
    let mut previous: Option<Messages<T>> = None;
    for &z in ladder {
        let (run, warm) = match &previous {
            Some(lower) => run_labp_warm(g, z, cfg, lower)?,
            None => (run_labp(g, z, cfg)?, false),
        };
        let fm_tol = T::of(1e-9) + T::of(4.0) * run.relative_gap();
        let x = x_of_z(g, z, &run.y, fm_tol)?;
        steps.push(AnnealStep {
            z,
            value: x.value(),
            x,
            gap: run.envelope.gap,
            rounds: run.envelope.rounds,
            termination: run.termination,
            warm_started: warm,
            sandwich_violations: run.envelope.sandwich_violations,
        });
        previous = Some(run.envelope.lower);
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use approx::assert_relative_eq;

    fn closed_form(z: f64) -> f64 {
        (0.25 + z).sqrt() - 0.5
    }

    #[test]
    fn update_examples() {
        let c3 = generators::cycle(3);
        let out = bp_update(&c3, 2.0, &Messages::zeros(&c3));
        assert!(out.iter().all(|&m| m == 2.0));
        let out = bp_update(&c3, 2.0, &Messages::constant(&c3, 1.0));
        assert!(out.iter().all(|&m| m == 1.0));

        let p3 = generators::path(3);
        let m = Messages(vec![0.3, 1.7, 2.2, 0.9]);
        let out = bp_update(&p3, 5.0, &m);
        for v in [0, 2] {
            for d in p3.out_edges(v) {
                assert_eq!(out[d], 5.0);
            }
        }
    }

    #[test]
    fn triangle_matches_closed_form() {
        let c3 = generators::cycle(3);
        for z in [2.0, 10.0] {
            let run = run_labp(&c3, z, &LabpConfig::default()).unwrap();
            assert!(run.converged());
            for &y in run.y.iter() {
                assert_relative_eq!(y, closed_form(z), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn path_hand_fixed_point() {
        let p3 = generators::path(3);
        let run = run_labp(&p3, 3.0, &LabpConfig::default()).unwrap();
        assert!(run.converged());
        assert_eq!(run.envelope.gap, 0.0, "trees converge exactly");
        for leaf in [0, 2] {
            let to_centre = p3.find_directed(leaf, 1).unwrap();
            let from_centre = p3.find_directed(1, leaf).unwrap();
            assert_eq!(run.y[to_centre], 3.0);
            assert_relative_eq!(run.y[from_centre], 0.75, epsilon = 1e-15);
        }
        let x = x_of_z(&p3, 3.0, &run.y, 1e-12).unwrap();
        for &xe in &x.x {
            assert_relative_eq!(xe, 3.0 / 7.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn x_of_z_triangle() {
        let c3 = generators::cycle(3);
        let x = x_of_z(&c3, 2.0, &Messages::constant(&c3, 1.0), 1e-12).unwrap();
        assert!(x.x.iter().all(|&v: &f64| (v - 1.0 / 3.0).abs() < 1e-15));
        assert_relative_eq!(x.value(), 1.0, epsilon = 1e-14);

        let z = 10.0;
        let y = closed_form(z);
        let x = x_of_z(&c3, z, &Messages::constant(&c3, y), 1e-12).unwrap();
        // frozen from (z − Y)/(2z − Y)
        assert_relative_eq!(x.x[0], 0.421_913_119_056, epsilon = 1e-11);
        assert_relative_eq!(x.x[0], (z - y) / (2.0 * z - y), epsilon = 1e-14);
        assert_relative_eq!(x.value(), 1.265_739_357_167, epsilon = 1e-11);
    }

    #[test]
    fn x_of_z_rejects_infeasible_messages() {
        let c3 = generators::cycle(3);
        let err = x_of_z(&c3, 1.0, &Messages::constant(&c3, 100.0), 1e-9).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn d_v_examples() {
        let g = Graph::new(2, &[]).unwrap();
        assert_eq!(d_v(&g, &Messages::<f64>::zeros(&g), 0), 0.0);
        let c3 = generators::cycle(3);
        let y = Messages::constant(&c3, 1.0);
        for v in 0..3 {
            assert_relative_eq!(d_v(&c3, &y, v), 2.0 / 3.0);
        }
    }

    #[test]
    fn d_v_sums_to_twice_matching_value() {
        for (i, g) in [generators::petersen(), generators::random_gnm(9, 14, 4), generators::complete(5)]
            .iter()
            .enumerate()
        {
            let z = 1.5 + i as f64;
            let run = run_labp(g, z, &LabpConfig::default()).unwrap();
            let x = x_of_z(g, z, &run.y, 1e-9).unwrap();
            let total: f64 = (0..g.n_vertices()).map(|v| d_v(g, &run.y, v)).sum();
            assert_relative_eq!(total, 2.0 * x.value(), epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_temperatures() {
        let c3 = generators::cycle(3);
        for z in [0.0, -1.0, f64::NAN, f64::INFINITY, 1e301] {
            assert!(run_labp(&c3, z, &LabpConfig::default()).is_err(), "{z}");
        }
        assert!(anneal(&c3, &[10.0, 1.0], &LabpConfig::default()).is_err());
    }

    #[test]
    fn max_rounds_is_reported() {
        let c3 = generators::cycle(3);
        let run = run_labp(&c3, 1e6, &LabpConfig { tol: 1e-12, max_rounds: 20 }).unwrap();
        assert_eq!(run.termination, Termination::MaxRounds);
        assert!(run.envelope.gap > 0.0);
        assert!(run.envelope.lower.le(&run.envelope.upper));
    }

    #[test]
    fn residual_bounded_by_gap() {
        for g in [generators::petersen(), generators::random_gnm(12, 20, 9)] {
            for z in [0.5, 5.0, 100.0] {
                let run = run_labp(&g, z, &LabpConfig::default()).unwrap();
                let r = fixed_point_residual(&g, z, &run.y);
                assert!(r <= 2.0 * run.envelope.gap + 1e-12 * z, "{r} vs {}", run.envelope.gap);
            }
        }
    }

    #[test]
    fn single_edge_value() {
        let k2 = generators::path(2);
        for z in [1.0, 1e3, 1e6] {
            let run = run_labp(&k2, z, &LabpConfig::default()).unwrap();
            assert!(run.y.iter().all(|&m| m == z));
            let x = x_of_z(&k2, z, &run.y, 1e-12).unwrap();
            assert_relative_eq!(x.value(), z / (1.0 + z), epsilon = 1e-14);
        }
    }

    #[test]
    fn anneal_triangle_ladder() {
        let c3 = generators::cycle(3);
        let steps = anneal(&c3, &[1e2, 1e4, 1e6, 1e8], &LabpConfig::default()).unwrap();
        let expected = [1.425_093_574_584, 1.492_500_093_748, 1.499_250_000_094, 1.499_925_000_000];
        for (s, want) in steps.iter().zip(expected) {
            let y = closed_form(s.z);
            let exact = 3.0 * (s.z - y) / (2.0 * s.z - y);
            assert!((s.value - exact).abs() < 1e-7, "z={} {} vs {}", s.z, s.value, exact);
            assert!((s.value - want).abs() < 1e-9, "z={} {}", s.z, s.value);
            assert_eq!(s.sandwich_violations, 0);
        }
        assert!(steps.windows(2).all(|w| w[0].value < w[1].value));
        assert!(steps[1..].iter().all(|s| s.warm_started));
    }

    #[test]
    fn anneal_four_cycle_approaches_two() {
        let c4 = generators::cycle(4);
        let steps = anneal(&c4, &default_ladder::<f64>(), &LabpConfig::default()).unwrap();
        assert!((steps.last().unwrap().value - 2.0).abs() < 1e-3);
    }

    #[test]
    fn works_in_single_precision() {
        let c3 = generators::cycle(3);
        let cfg = LabpConfig { tol: 1e-6f32, max_rounds: 10_000 };
        let run = run_labp(&c3, 2.0f32, &cfg).unwrap();
        for &y in run.y.iter() {
            assert!((y - 1.0).abs() < 1e-5);
        }
        let x = x_of_z(&c3, 2.0f32, &run.y, 1e-5).unwrap();
        assert!((x.value() - 1.0).abs() < 1e-5);
    }
}
