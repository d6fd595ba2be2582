#![allow(dead_code)]

use ndarray::Array2;
use proptest::prelude::*;
use wtopo::graph::Graph;

/// All-pairs shortest paths by Floyd–Warshall, `inf` across components.
pub fn floyd_warshall(g: &Graph) -> Array2<f64> {
    let n = g.num_nodes();
    let mut d = Array2::from_elem((n, n), f64::INFINITY);
    for v in 0..n {
        d[[v, v]] = 0.0;
    }
    for (u, v, w) in g.edges() {
        d[[u, v]] = w;
        d[[v, u]] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[[i, k]] + d[[k, j]];
                if via < d[[i, j]] {
                    d[[i, j]] = via;
                }
            }
        }
    }
    d
}

/// Graphs on `1..=max_n` nodes with integer weights in `1..=max_w`
/// (`max_w = 1` gives unit weights). Not necessarily connected.
pub fn arb_graph(max_n: usize, max_w: u32) -> impl Strategy<Value = Graph> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let len = pairs.len();
            (Just(pairs), proptest::collection::vec(0..=max_w, len), Just(n))
        })
        .prop_map(|(pairs, weights, n)| {
            let edges = pairs
                .into_iter()
                .zip(weights)
                .filter(|&(_, w)| w > 0)
                .map(|((u, v), w)| (u, v, w as f64));
            Graph::new(n, edges).unwrap()
        })
}
