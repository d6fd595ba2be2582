mod common;

use common::{arb_graph, floyd_warshall};
use proptest::prelude::*;
use wtopo::graph::{
    adjacency_l1_distance, build_knn_graph, geodesics, geodesics_with, largest_connected_component, Traversal,
};
use wtopo::synth::random_graph;

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn geodesics_match_floyd_warshall_and_triangle_inequality(g in arb_graph(30, 4)) {
        let n = g.num_nodes();
        let d = geodesics(&g, &all(n)).unwrap();
        let oracle = floyd_warshall(&g);
        prop_assert_eq!(d.as_array(), &oracle);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                for k in 0..n {
                    prop_assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j));
                }
            }
        }
    }

    #[test]
    fn bfs_agrees_with_dijkstra_on_unit_weights(g in arb_graph(30, 1)) {
        let sources = all(g.num_nodes());
        let bfs = geodesics_with(&g, &sources, Traversal::Bfs).unwrap();
        let dijkstra = geodesics_with(&g, &sources, Traversal::Dijkstra).unwrap();
        prop_assert_eq!(bfs, dijkstra);
    }

    #[test]
    fn l1_distance_is_symmetric_and_zero_on_diagonal(n in 2usize..25, m1 in 0usize..40, m2 in 0usize..40, seed in any::<u64>()) {
        let cap = n * (n - 1) / 2;
        let a = random_graph(n, m1.min(cap), seed).unwrap();
        let b = random_graph(n, m2.min(cap), seed ^ 1).unwrap();
        prop_assert_eq!(adjacency_l1_distance(&a, &a).unwrap(), 0);
        prop_assert_eq!(adjacency_l1_distance(&a, &b).unwrap(), adjacency_l1_distance(&b, &a).unwrap());
    }

    #[test]
    fn knn_min_degree(rows in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 4), 3..15), k in 1usize..3) {
        let n = rows.len();
        let flat: Vec<f64> = rows.iter().flatten().map(|x| x + 3.0).collect();
        let x = ndarray::Array2::from_shape_vec((n, 4), flat).unwrap();
        let g = build_knn_graph(&x, k).unwrap();
        prop_assert!(g.degrees().iter().all(|&d| d >= k));
    }
}

#[test]
fn bfs_refuses_weighted_graphs() {
    let g = wtopo::graph::Graph::new(2, [(0, 1, 2.0)]).unwrap();
    assert!(geodesics_with(&g, &[0], Traversal::Bfs).is_err());
}

#[test]
fn largest_component_of_random_sparse_graph() {
    let g = random_graph(40, 25, 3).unwrap();
    let comps = g.connected_components();
    let lcc = largest_connected_component(&g);
    assert_eq!(lcc.graph.num_nodes(), comps.iter().map(Vec::len).max().unwrap());
    assert!(lcc.graph.is_connected());
    for (new, &old) in lcc.original.iter().enumerate() {
        assert_eq!(lcc.new_index(old), Some(new));
    }
}
