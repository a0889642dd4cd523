mod common;

use labp::{generators, oracle, HalfInt};
use proptest::prelude::*;

#[test]
fn quarter_grid_never_beats_half_integral_optimum() {
    let mut checked = 0;
    for (name, g) in generators::standard_corpus(40, 7) {
        if g.n_edges() > oracle::GRID_CAP {
            continue;
        }
        let half = oracle::nu_star_bruteforce(&g).unwrap();
        let quarters = oracle::nu_star_quarter_grid(&g).unwrap();
        assert_eq!(quarters as i64, 2 * half.twice(), "{name}");
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} graphs small enough");
}

#[test]
fn petersen_report_uses_cover_side() {
    let r = oracle::oracle_report(&generators::petersen());
    assert_eq!(r.nu, Some(5));
    assert_eq!(r.tau, Some(6));
    assert_eq!(r.nu_star, Some(HalfInt::from_int(5)));
    assert_eq!(r.tau_star, r.nu_star);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_duality_on_half_integral_grids(g in common::graph(9, 12)) {
        let nu_star = oracle::nu_star_bruteforce(&g).unwrap();
        prop_assert_eq!(nu_star, oracle::tau_half_bruteforce(&g).unwrap());
        let counts = oracle::enumerate_matchings(&g).unwrap();
        let tau = oracle::tau_bruteforce(&g).unwrap();
        let nu = HalfInt::from_int(counts.nu as i64);
        prop_assert!(nu <= nu_star);
        prop_assert!(nu_star.twice() <= 2 * counts.nu as i64 + (g.n_vertices() as i64) / 2);
        prop_assert!(counts.nu <= tau && tau <= 2 * counts.nu);
        prop_assert!(nu_star <= HalfInt::from_int(tau as i64));
    }

    #[test]
    fn bipartite_optima_coincide(g in common::bipartite(5)) {
        let b = g.bipartition().unwrap();
        let hk = oracle::bipartite_max_matching(&g, &b).unwrap();
        let counts = oracle::enumerate_matchings(&g).unwrap();
        prop_assert_eq!(hk, counts.nu);
        prop_assert_eq!(oracle::tau_bruteforce(&g).unwrap(), hk);
        if g.n_edges() <= oracle::NU_STAR_CAP {
            prop_assert_eq!(oracle::nu_star_bruteforce(&g).unwrap(), HalfInt::from_int(hk as i64));
        }
    }

    #[test]
    fn pp_fixed_points_reach_twice_nu_star(g in common::graph(6, 8)) {
        let pp = oracle::enumerate_pp_fixed_points(&g).unwrap();
        prop_assert!(!pp.points.is_empty());
        prop_assert_eq!(pp.min_f as i64, oracle::nu_star_bruteforce(&g).unwrap().twice());
    }

    #[test]
    fn matching_counts_are_consistent(g in common::graph(10, 14)) {
        let counts = oracle::enumerate_matchings(&g).unwrap();
        prop_assert_eq!(counts.counts[0], 1);
        prop_assert_eq!(counts.counts[1], g.n_edges() as u64);
        prop_assert_eq!(counts.counts.len(), counts.nu + 1);
        let listed = oracle::list_matchings(&g).unwrap();
        prop_assert_eq!(listed.len() as u64, counts.counts.iter().sum::<u64>());
    }
}
