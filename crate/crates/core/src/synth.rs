//! Seeded synthetic graphs for tests, benchmarks and the CLI.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Maps `k` in `[0, n(n-1)/2)` to the `k`-th pair `(u, v)`, `u < v`, in
/// lexicographic order.
pub(crate) fn unrank_pair(n: usize, mut k: usize) -> (usize, usize) {
    let mut u = 0;
    loop {
        let row = n - u - 1;
        if k < row {
            return (u, u + 1 + k);
        }
        k -= row;
        u += 1;
    }
}

/// Connected unit-weight graph: a random recursive tree on `n` nodes plus
/// `extra_edges` further distinct edges chosen uniformly.
pub fn random_connected_graph(n: usize, extra_edges: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::argument("graph needs at least one node"));
    }
    let total = n * (n - 1) / 2;
    if extra_edges > total - (n - 1) {
        return Err(Error::argument(format!(
            "{extra_edges} extra edges do not fit in a {n}-node graph"
        )));
    }
    let mut rng = rng(seed);
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    while edges.len() < n - 1 + extra_edges {
        let (u, v) = unrank_pair(n, rng.gen_range(0..total));
        edges.insert((u, v));
    }
    Graph::from_pairs(n, edges)
}

/// Same edges as `g`, weights drawn uniformly from `[lo, hi)`.
pub fn with_random_weights(g: &Graph, lo: f64, hi: f64, seed: u64) -> Result<Graph> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::argument("weights need 0 < lo < hi"));
    }
    let mut rng = rng(seed);
    Graph::new(g.num_nodes(), g.edges().map(|(u, v, _)| (u, v, rng.gen_range(lo..hi))))
}

/// Erdős–Rényi-style graph with exactly `m` edges (may be disconnected).
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let total = n * n.saturating_sub(1) / 2;
    if m > total {
        return Err(Error::argument(format!("{m} edges do not fit in a {n}-node graph")));
    }
    let mut rng = rng(seed);
    let mut picks = sample(&mut rng, total, m).into_vec();
    picks.sort_unstable();
    Graph::from_pairs(n, picks.into_iter().map(|k| unrank_pair(n, k)))
}
