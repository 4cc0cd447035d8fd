use proptest::prelude::*;

use sparsecolor::coloring::hopcroft_karp;
use sparsecolor::decomposition::{exact_extended_decomposition, verify_decomposition, DecompositionBounds};
use sparsecolor::graph::generate::{clique_collection, gnp_capped};
use sparsecolor::harness::oracles::brute_force_matching;
use sparsecolor::harness::{color_offline, verify_coloring, DecompositionMode, OfflineConfig};
use sparsecolor::Graph;

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..60, 0.0f64..0.7, 1usize..16, any::<u64>())
        .prop_map(|(n, p, cap, seed)| gnp_capped(n, p, cap.min(n - 1), seed).unwrap())
}

fn bipartite() -> impl Strategy<Value = (Vec<Vec<usize>>, usize)> {
    (1usize..10, 1usize..10).prop_flat_map(|(l, r)| {
        (prop::collection::vec(prop::collection::btree_set(0..r, 0..=r), l), Just(r))
            .prop_map(|(rows, r)| (rows.into_iter().map(|s| s.into_iter().collect()).collect(), r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hopcroft_karp_is_maximum((adj, right) in bipartite()) {
        let mate = hopcroft_karp(&adj, right);
        let size = mate.iter().flatten().count();
        prop_assert_eq!(size, brute_force_matching(&adj, right));
        // a matching: listed edges exist and right endpoints are distinct
        let mut used = vec![false; right];
        for (u, m) in mate.iter().enumerate() {
            if let Some(v) = *m {
                prop_assert!(adj[u].contains(&v));
                prop_assert!(!used[v]);
                used[v] = true;
            }
        }
    }

    #[test]
    fn offline_coloring_is_proper(g in small_graph(), seed in any::<u64>(), sampled in any::<bool>()) {
        let mut cfg = OfflineConfig::new(seed);
        if sampled {
            cfg.decomposition = DecompositionMode::Sampled;
        }
        let out = color_offline(&g, &cfg).unwrap();
        let report = verify_coloring(&g, &out.colors, None, false);
        prop_assert!(report.is_clean(), "{:?}", report);
        prop_assert!(report.colors_used <= g.max_degree() + 1);
    }

    #[test]
    fn offline_coloring_is_deterministic(g in small_graph(), seed in any::<u64>()) {
        let cfg = OfflineConfig::new(seed);
        prop_assert_eq!(color_offline(&g, &cfg).unwrap().colors, color_offline(&g, &cfg).unwrap().colors);
    }

    #[test]
    fn list_compliant_runs_respect_lists(g in small_graph(), seed in any::<u64>()) {
        let out = color_offline(&g, &OfflineConfig::new(seed)).unwrap();
        if out.report.pipeline.list_compliant {
            prop_assert!(verify_coloring(&g, &out.colors, Some(&out.palette), true).is_clean());
        }
    }

    #[test]
    fn exact_decomposition_verifies(g in small_graph(), eps in 0.02f64..=1.0 / 6.0) {
        let d = exact_extended_decomposition(&g, eps).unwrap();
        let report = verify_decomposition(&g, &d, DecompositionBounds::exact(eps));
        prop_assert!(report.is_valid(), "{:?}", report.violations);
    }
}

#[test]
fn disjoint_cliques_decompose_into_cliques() {
    let g = clique_collection(40, 5).unwrap();
    let d = exact_extended_decomposition(&g, 1.0 / 6.0).unwrap();
    assert!(d.sparse.is_empty());
    assert_eq!(d.cliques.len(), 5);
    assert!(d.cliques.iter().all(|c| c.len() == 40));
}

#[test]
fn single_clique_colored_from_lists() {
    let g = clique_collection(64, 1).unwrap();
    let out = color_offline(&g, &OfflineConfig::new(3)).unwrap();
    assert!(verify_coloring(&g, &out.colors, Some(&out.palette), true).is_clean());
    assert_eq!(out.report.pipeline.uncolored, 0);
}
