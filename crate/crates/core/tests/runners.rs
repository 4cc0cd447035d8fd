use proptest::prelude::*;

use sparsecolor::graph::generate::{clique_collection, gnp_capped};
use sparsecolor::graph::{to_stream, QueryOracle};
use sparsecolor::harness::verify_coloring;
use sparsecolor::mpc::{default_memory_cap, mpc_reference, run_mpc, MpcConfig, Partition};
use sparsecolor::query_runner::{run_query_model, QueryBranch, QueryRunConfig};
use sparsecolor::sketch::Fidelity;
use sparsecolor::stream_runner::{run_stream, StreamRunConfig};
use sparsecolor::Graph;

fn small_graph() -> impl Strategy<Value = Graph> {
    (8usize..80, 0.05f64..0.8, 2usize..20, any::<u64>())
        .prop_map(|(n, p, cap, seed)| gnp_capped(n, p, cap.min(n - 1), seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stream_run_is_proper(g in small_graph(), churn in 0.0f64..0.5, seed in any::<u64>(), sketch in any::<bool>()) {
        let events = to_stream(&g, churn, seed).unwrap();
        let mut cfg = StreamRunConfig::new(g.n(), g.max_degree(), seed);
        if sketch {
            cfg.fidelity = Fidelity::Sketch;
        }
        let out = run_stream(&events, &cfg).unwrap();
        prop_assert!(verify_coloring(&g, &out.colors, Some(&out.palette), true).is_clean());
        prop_assert_eq!(out.report.final_edges, g.m());
        prop_assert_eq!(out.report.events_consumed, events.len());
    }

    #[test]
    fn stream_delta_estimate_adds_a_pass(g in small_graph(), seed in any::<u64>()) {
        let events = to_stream(&g, 0.2, seed).unwrap();
        let mut cfg = StreamRunConfig::new(g.n(), g.max_degree(), seed);
        cfg.delta = None;
        let out = run_stream(&events, &cfg).unwrap();
        prop_assert_eq!(out.report.pass_count, 2);
        prop_assert!(verify_coloring(&g, &out.colors, None, false).is_clean());
    }

    #[test]
    fn query_run_is_proper(g in small_graph(), seed in any::<u64>()) {
        let mut oracle = QueryOracle::new(&g);
        let out = run_query_model(&mut oracle, g.n(), g.max_degree(), &QueryRunConfig::new(seed)).unwrap();
        prop_assert!(verify_coloring(&g, &out.colors, None, false).is_clean());
        let r = &out.report;
        prop_assert_eq!(r.total, r.degree_q + r.neighbor_q + r.pair_q);
        if r.branch == QueryBranch::Greedy {
            prop_assert_eq!(r.total, 2 * g.m() as u64);
        }
    }

    #[test]
    fn mpc_matches_reference_under_any_partition(g in small_graph(), seed in any::<u64>(), public in any::<bool>()) {
        let cap = default_memory_cap(g.n(), 8.0).max(4 * g.m() as u64 + 64);
        let mut cfg = MpcConfig::new(4, cap, public, seed);
        let (reference, _) = mpc_reference(&g, &cfg).unwrap();
        let max_rounds = if public { 1 } else { 3 };
        for partition in [Partition::RoundRobin, Partition::Shuffled] {
            cfg.partition = partition;
            let out = run_mpc(&g, &cfg).unwrap();
            prop_assert_eq!(&out.colors, &reference);
            prop_assert!(out.report.rounds <= max_rounds);
            prop_assert!(out.report.max_in_words <= cap && out.report.max_state_words <= cap);
        }
        prop_assert!(verify_coloring(&g, &reference, None, false).is_clean());
    }
}

#[test]
fn query_greedy_on_small_degree_reads_each_row_once() {
    let g = gnp_capped(400, 0.03, 20, 5).unwrap();
    let mut oracle = QueryOracle::new(&g);
    let out = run_query_model(&mut oracle, g.n(), g.max_degree(), &QueryRunConfig::new(1)).unwrap();
    assert_eq!(out.report.branch, QueryBranch::Greedy);
    assert_eq!(out.report.total, 2 * g.m() as u64);
    assert_eq!(out.report.degree_q, 0);
}

#[test]
fn mpc_fails_loudly_when_the_cap_is_tiny() {
    let g = clique_collection(30, 4).unwrap();
    let cfg = MpcConfig::new(4, 50, true, 2);
    assert!(run_mpc(&g, &cfg).is_err());
}

#[test]
fn stream_rejects_degree_overflow() {
    let g = clique_collection(12, 2).unwrap();
    let events = to_stream(&g, 0.0, 1).unwrap();
    let cfg = StreamRunConfig::new(g.n(), 5, 1);
    assert!(run_stream(&events, &cfg).is_err());
}
