use labp::bethe::{self, LOOP_CAP};
use labp::bp::{self, LabpConfig};
use labp::oracle;
use labp::zero_temp::{self, Solution, SolverConfig};
use labp::{Error, Graph, HalfInt, Result};
use serde_json::{json, Value};

use crate::report::{edge_label, half, num, nums, Report};

/// Largest tree for which `match` compares against exact Gibbs marginals.
const GIBBS_CHECK_EDGES: usize = 12;
const GIBBS_CHECK_TOL: f64 = 1e-9;
const TOP_LOOP_TERMS: usize = 10;
const WARN_Z: f64 = 1e12;

fn add_solution(report: &mut Report, g: &Graph, sol: &Solution<f64>) {
    report.result("nu_star", sol.nu_star.map_or(Value::Null, half));
    match &sol.cover {
        Some(cover) => {
            report.result("cover_y", Value::Array(cover.y.iter().map(|&h| half(h)).collect()));
            report.result("cover_value", half(cover.value()));
            report.result("half_vertices", json!(cover.half_count()));
            let rounded = cover.rounded();
            report.result("rounded_cover", json!(rounded.members()));
            report.result("rounded_size", json!(rounded.size()));
            report.result("rounded_feasible", json!(rounded.is_feasible(g)));
        }
        None => report.result("cover_y", Value::Null),
    }
    report.certificate("primal_sum_x", num(sol.primal.value()));
    if let Some(c) = &sol.certificate {
        report.certificate("dual", half(c.dual));
        report.certificate("duality_gap", num(c.gap));
        report.certificate("gap_tol", num(c.gap_tol));
        report.certificate("duality_passed", json!(c.passed));
    }
    let fp = &sol.fixed_point;
    report.certificate("fixed_point_stationary", json!(fp.stationary));
    report.certificate("pp_fixed", json!(fp.pp_fixed));
    report.certificate("fixed_point_rounds", json!(fp.rounds));
    report.certificate("divergence_bound", num(fp.bound));
    report.certificate("monotone_violations", json!(fp.monotone_violations));
    report.certificate("attempts", json!(sol.attempts));
    if let Some(d) = &sol.diagnostic {
        report.notices.push(d.clone());
    }
    report.certified = sol.certified;
}

pub fn nu_star(g: &Graph) -> Result<Report> {
    let sol = zero_temp::solve::<f64>(g, &SolverConfig::default())?;
    let mut report = Report::new("nu-star", g);
    add_solution(&mut report, g, &sol);
    Ok(report)
}

pub fn cover(g: &Graph, bipartite: bool) -> Result<Report> {
    if !bipartite {
        let mut report = nu_star(g)?;
        report.command = "cover";
        return Ok(report);
    }
    let b = g.bipartition().ok_or_else(|| Error::NotBipartite { cycle: g.odd_cycle().unwrap_or_default() })?;
    let sol = zero_temp::solve::<f64>(g, &SolverConfig::default())?;
    let mut report = Report::new("cover", g);
    let oracle_nu = oracle::bipartite_max_matching(g, &b)?;
    if sol.certified {
        let cover = zero_temp::bipartite_cover(g, &b, &sol.fixed_point.i_y)?;
        report.result("cover", json!(cover.members()));
        report.result("cover_size", json!(cover.size()));
        report.certificate("cover_feasible", json!(cover.is_feasible(g)));
        report.certificate("sum_f_over_2", half(HalfInt::from_twice(zero_temp::f_sum(g, &sol.fixed_point.i_y) as i64)));
        report.certificate("augmenting_path_nu", json!(oracle_nu));
        let agrees = cover.size() == oracle_nu && cover.is_feasible(g);
        report.certificate("matches_oracle", json!(agrees));
        report.certified = agrees;
    } else {
        report.result("cover", Value::Null);
        report.certificate("augmenting_path_nu", json!(oracle_nu));
        report.certified = false;
    }
    report.certificate("primal_sum_x", num(sol.primal.value()));
    if let Some(c) = &sol.certificate {
        report.certificate("duality_gap", num(c.gap));
        report.certificate("duality_passed", json!(c.passed));
    }
    report.certificate("pp_fixed", json!(sol.fixed_point.pp_fixed));
    report.certificate("fixed_point_rounds", json!(sol.fixed_point.rounds));
    if let Some(d) = &sol.diagnostic {
        report.notices.push(d.clone());
    }
    Ok(report)
}

pub struct MatchArgs {
    pub z: f64,
    pub tol: f64,
    pub max_rounds: usize,
    pub anneal: bool,
}

pub fn matching(g: &Graph, args: &MatchArgs) -> Result<Report> {
    let cfg = LabpConfig { tol: args.tol, max_rounds: args.max_rounds };
    let mut report = Report::new("match", g);
    report.result("edges", Value::Array((0..g.n_edges()).map(|k| Value::String(edge_label(g, k))).collect()));
    if args.anneal {
        let ladder = bp::default_ladder::<f64>();
        warn_large_z(*ladder.last().unwrap());
        let steps = bp::anneal(g, &ladder, &cfg)?;
        let rungs: Vec<Value> = steps
            .iter()
            .map(|s| {
                json!({
                    "z": num(s.z),
                    "sum_x": num(s.value),
                    "envelope_gap": num(s.gap),
                    "rounds": s.rounds,
                    "termination": s.termination.as_str(),
                    "warm_started": s.warm_started,
                })
            })
            .collect();
        let last = steps.last().unwrap();
        report.result("ladder", Value::Array(rungs));
        report.result("x", nums(&last.x.x));
        report.result("sum_x", num(last.value));
        report.certificate("sandwich_violations", json!(steps.iter().map(|s| s.sandwich_violations).sum::<usize>()));
        let unconverged = steps.iter().filter(|s| s.termination != bp::Termination::Converged).count();
        if unconverged > 0 {
            report.notices.push(format!("{unconverged} rung(s) did not converge"));
            report.certified = false;
        }
        return Ok(report);
    }

    warn_large_z(args.z);
    let run = bp::run_labp(g, args.z, &cfg)?;
    let fm_tol = 1e-9 + 4.0 * run.relative_gap();
    let x = bp::x_of_z(g, args.z, &run.y, fm_tol)?;
    report.result("z", num(args.z));
    report.result("x", nums(&x.x));
    report.result("sum_x", num(x.value()));
    report.certificate("termination", json!(run.termination.as_str()));
    report.certificate("rounds", json!(run.envelope.rounds));
    report.certificate("envelope_gap", num(run.envelope.gap));
    report.certificate("error_bound", num(run.error_bound()));
    report.certificate("fixed_point_residual", num(bp::fixed_point_residual(g, args.z, &run.y)));
    report.certificate("sandwich_violations", json!(run.envelope.sandwich_violations));
    if g.is_forest() && g.n_edges() <= GIBBS_CHECK_EDGES {
        let gibbs = bethe::gibbs_marginals(g, args.z)?;
        let dev = x.x.iter().zip(&gibbs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        report.certificate("gibbs_max_deviation", num(dev));
        report.certificate("gibbs_check_passed", json!(dev <= GIBBS_CHECK_TOL));
        if dev > GIBBS_CHECK_TOL {
            report.certified = false;
        }
    }
    if !run.converged() {
        report.notices.push(format!("envelope {} with gap {:e}", run.termination.as_str(), run.envelope.gap));
        report.certified = false;
    }
    Ok(report)
}

pub fn bethe(g: &Graph, z: f64, loops: bool, cfg: &LabpConfig<f64>) -> Result<Report> {
    warn_large_z(z);
    let loop_cap = loops.then_some(LOOP_CAP);
    let rep = bethe::bethe_report(g, z, cfg, loop_cap)?;
    let mut report = Report::new("bethe", g);
    report.result("z", num(z));
    report.result("x", nums(&rep.x.x));
    report.result("u_b", num(rep.u_b));
    report.result("s_b", num(rep.s_b));
    report.result("phi_b", num(rep.phi_b));
    match rep.phi_exact {
        Some(p) => report.result("phi_g", num(p)),
        None => report.notices.push(format!("exact free entropy skipped: |E| = {} exceeds {}", g.n_edges(), bethe::POLY_CAP)),
    }
    if loops {
        match &rep.loops {
            Some(series) => {
                report.result("loop_z", num(series.z_value));
                report.result("ln_loop_z", num(series.z_value.ln()));
                report.result("loop_terms", json!(series.terms.len()));
                if let Some(r) = rep.residual() {
                    report.certificate("loop_residual", num(r));
                }
                let top: Vec<Value> = series
                    .top_terms(TOP_LOOP_TERMS)
                    .into_iter()
                    .map(|t| {
                        let edges: Vec<String> = t.edges.iter().map(|&k| edge_label(g, k)).collect();
                        json!({ "edges": edges.join(" "), "term": num(t.contribution) })
                    })
                    .collect();
                report.result("top_loops", Value::Array(top));
            }
            None => report.notices.push(format!("loop series skipped: |E| = {} exceeds {}", g.n_edges(), LOOP_CAP)),
        }
    }
    report.certificate("termination", json!(rep.termination.as_str()));
    report.certificate("envelope_gap", num(rep.envelope_gap));
    report.certified = rep.termination == bp::Termination::Converged;
    Ok(report)
}

pub fn oracle(g: &Graph) -> Report {
    let r = oracle::oracle_report(g);
    let mut report = Report::new("oracle", g);
    report.result("nu", r.nu.map_or(Value::Null, |v| json!(v)));
    report.result("tau", r.tau.map_or(Value::Null, |v| json!(v)));
    report.result("nu_star", r.nu_star.map_or(Value::Null, half));
    report.result("tau_star", r.tau_star.map_or(Value::Null, half));
    report.result("nu_star_method", r.method.map_or(Value::Null, |m| json!(m.as_str())));
    report.result("matching_polynomial", r.matching_counts.map_or(Value::Null, |c| json!(c)));
    report.result("pp_min_sum_f", r.pp_min_f.map_or(Value::Null, |v| json!(v)));
    report.notices = r.notices;
    report
}

fn warn_large_z(z: f64) {
    if z > WARN_Z {
        eprintln!(
            "warning: z = {z:e} is above {WARN_Z:e}; the exactness threshold e^|E| overflows double precision for large graphs, use nu-star for exact values"
        );
    }
}
