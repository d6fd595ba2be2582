use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView1};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct KnnConfig {
    pub k: usize,
    /// Lower bound substituted for zero cosine distances so that every edge
    /// weight stays strictly positive.
    pub zero_floor: f64,
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        KnnConfig { k, zero_floor: 1e-9 }
    }
}

/// kNN graph under cosine distance, symmetrised by union. Ties between
/// equidistant neighbours go to the lower node index.
pub fn build_knn_graph(features: &Array2<f64>, k: usize) -> Result<Graph> {
    build_knn_graph_with(features, KnnConfig::new(k))
}

pub fn build_knn_graph_with(features: &Array2<f64>, cfg: KnnConfig) -> Result<Graph> {
    let n = features.nrows();
    if cfg.k == 0 || cfg.k >= n {
        return Err(Error::argument(format!(
            "k must satisfy 1 <= k < N (k = {}, N = {n})",
            cfg.k
        )));
    }
    if !(cfg.zero_floor > 0.0) {
        return Err(Error::argument("zero_floor must be positive"));
    }
    let norms: Vec<f64> = features.rows().into_iter().map(|r| r.dot(&r).sqrt()).collect();
    if let Some(u) = norms.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::validation(format!("feature row {u} has zero or non-finite norm")));
    }

    let dist = |u: usize, v: usize, a: ArrayView1<f64>, b: ArrayView1<f64>| {
        (1.0 - a.dot(&b) / (norms[u] * norms[v])).max(cfg.zero_floor)
    };

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut candidates = Vec::with_capacity(n - 1);
    for u in 0..n {
        candidates.clear();
        let row_u = features.row(u);
        for v in (0..n).filter(|&v| v != u) {
            candidates.push((dist(u, v, row_u, features.row(v)), v));
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d, v) in &candidates[..cfg.k] {
            edges.insert((u.min(v), u.max(v)), d);
        }
    }
    let g = Graph::new(n, edges.into_iter().map(|((u, v), w)| (u, v, w)))?;
    g.with_features(features.clone())
}
