use proptest::prelude::*;

use sparsecolor::graph::generate::gnp_capped;
use sparsecolor::graph::{read_stream, replay, to_stream, write_stream, StreamHeader};
use sparsecolor::{Edge, Graph};

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..40, 0.0f64..0.6, 1usize..12, any::<u64>())
        .prop_map(|(n, p, cap, seed)| gnp_capped(n, p, cap.min(n - 1), seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stream_replays_to_graph(g in small_graph(), churn in 0.0f64..1.0, seed in any::<u64>()) {
        let events = to_stream(&g, churn, seed).unwrap();
        prop_assert_eq!(replay(g.n(), &events).unwrap(), g);
    }

    #[test]
    fn stream_file_round_trip(g in small_graph(), seed in any::<u64>()) {
        let events = to_stream(&g, 0.3, seed).unwrap();
        let header = StreamHeader { n: Some(g.n()), delta: Some(g.max_degree()) };
        let mut buf = Vec::new();
        write_stream(&mut buf, header, &events).unwrap();
        let (h, back) = read_stream(&buf[..]).unwrap();
        prop_assert_eq!(h, header);
        prop_assert_eq!(back, events);
    }

    #[test]
    fn edge_list_round_trip(g in small_graph()) {
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        prop_assert_eq!(Graph::read_edge_list(&buf[..]).unwrap(), g);
    }

    #[test]
    fn edge_keys_are_a_bijection(n in 2usize..5000, a in any::<u32>(), b in any::<u32>()) {
        let (a, b) = (a % n as u32, b % n as u32);
        prop_assume!(a != b);
        let e = Edge::new(a, b);
        let key = e.key(n);
        prop_assert!(key < (n * n) as u64);
        prop_assert_eq!(Edge::from_key(key, n), Some(e));
    }

    #[test]
    fn adjacency_rows_are_sorted_sets(g in small_graph()) {
        for v in g.vertices() {
            prop_assert_eq!(g.degree(v), g.neighbors(v).len());
            prop_assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn deletions_below_zero_are_rejected() {
    use sparsecolor::graph::StreamEvent;
    let events = [StreamEvent::delete(Edge::new(0, 1))];
    assert!(replay(2, &events).is_err());
}
