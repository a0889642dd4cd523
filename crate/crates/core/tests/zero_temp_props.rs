mod common;

use labp::zero_temp::{self, SolverConfig};
use labp::{generators, oracle, Graph, HalfInt};
use proptest::prelude::*;

fn fixed_point(g: &Graph) -> zero_temp::FixedPoint<f64> {
    let fp = zero_temp::smallest_fixed_point(g, zero_temp::default_divergence_bound(g), 10_000_000).unwrap();
    assert!(fp.stationary && fp.pp_fixed);
    assert_eq!(fp.monotone_violations, 0);
    fp
}

#[test]
fn every_double_map_fixed_point_gives_a_cover() {
    for n in 2..=5 {
        for g in generators::connected_graphs(n).into_iter().filter(|g| g.n_edges() <= 8) {
            let all = oracle::enumerate_pp_fixed_points(&g).unwrap();
            for (i, f) in &all.points {
                let cover = zero_temp::half_cover(&g, i).unwrap();
                assert!(cover.is_feasible(&g));
                assert_eq!(cover.value().twice() as usize, *f);
                assert_eq!(zero_temp::f_sum(&g, i), *f);
            }
        }
    }
}

#[test]
fn divergence_pattern_attains_the_infimum() {
    for n in 2..=5 {
        for g in generators::connected_graphs(n).into_iter().filter(|g| g.n_edges() <= 8) {
            let all = oracle::enumerate_pp_fixed_points(&g).unwrap();
            let nu = oracle::nu_star_bruteforce(&g).unwrap();
            assert_eq!(all.min_f as i64, nu.twice());
            let fp = fixed_point(&g);
            assert_eq!(zero_temp::f_sum(&g, &fp.i_y), all.min_f);
            assert!(all.points.iter().any(|(i, _)| *i == fp.i_y));
        }
    }
}

#[test]
fn boolean_map_matches_naive_definition() {
    for g in common::small_named() {
        for mask in 0u64..(1 << g.n_directed().min(12)) {
            let i = labp::BoolMsgVec::from_mask(&g, mask);
            assert_eq!(zero_temp::p_map(&g, &i), oracle::naive_p_map(&g, &i));
            for v in 0..g.n_vertices() {
                assert_eq!(zero_temp::f_v(&g, &i, v) as usize, oracle::naive_f(&g, &i, v));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn indicator_relations_hold(g in common::graph(9, 14)) {
        let fp = fixed_point(&g);
        let ix = zero_temp::i_x(&g, &fp.y);
        prop_assert_eq!(zero_temp::p_map(&g, &ix), fp.i_y.clone());
        prop_assert_eq!(zero_temp::p_map(&g, &fp.i_y), ix);
    }

    #[test]
    fn solver_matches_brute_force(g in common::graph(9, 12)) {
        let sol = zero_temp::solve::<f64>(&g, &SolverConfig::default()).unwrap();
        prop_assert!(sol.certified, "{:?}", sol.diagnostic);
        let nu = oracle::nu_star_bruteforce(&g).unwrap();
        prop_assert_eq!(sol.nu_star, Some(nu));
        let cover = sol.cover.unwrap();
        prop_assert!(cover.is_feasible(&g));
        prop_assert_eq!(cover.value(), nu);
        let rounded = cover.rounded();
        prop_assert!(rounded.is_feasible(&g));
        prop_assert!(rounded.size() <= 2 * oracle::tau_bruteforce(&g).unwrap());
    }

    #[test]
    fn bipartite_cover_is_minimum(g in common::bipartite(7)) {
        let (cover, sol) = zero_temp::min_vertex_cover_bipartite(&g, &SolverConfig::default()).unwrap();
        let b = g.bipartition().unwrap();
        let nu = oracle::bipartite_max_matching(&g, &b).unwrap();
        prop_assert!(cover.is_feasible(&g));
        prop_assert_eq!(cover.size(), nu);
        prop_assert_eq!(sol.nu_star, Some(HalfInt::from_int(nu as i64)));
    }
}

#[test]
fn uncertified_runs_are_reported_not_guessed() {
    let c5 = generators::cycle(5);
    let cfg = SolverConfig { max_rounds: 50, max_retries: 1, ..SolverConfig::default() };
    let sol = zero_temp::solve::<f64>(&c5, &cfg).unwrap();
    assert!(!sol.certified);
    assert!(sol.diagnostic.unwrap().contains("stationarity"));
    assert!(zero_temp::smallest_fixed_point::<f64>(&c5, 0.5, 10).is_err());
}

#[test]
fn single_precision_solver_agrees() {
    for g in [generators::cycle(3), generators::cycle(6), generators::star(3)] {
        let wide = zero_temp::solve::<f64>(&g, &SolverConfig::default()).unwrap();
        let narrow = zero_temp::solve::<f32>(&g, &SolverConfig::default()).unwrap();
        assert!(wide.certified && narrow.certified);
        assert_eq!(wide.nu_star, narrow.nu_star);
    }
}
