//! Undirected, optionally weighted graphs and the metric they induce.
//!
//! A [`Graph`] is immutable once built. Edges are kept in canonical
//! `(min, max)` order inside a sorted map so that iteration order, and
//! everything derived from it, is deterministic.

mod geodesic;
mod io;
mod knn;

use std::collections::{BTreeMap, VecDeque};

use ndarray::Array2;

use crate::error::{Error, Result};

pub use geodesic::{
    diameter, geodesics, geodesics_with, DistanceMatrix, Traversal, UNREACHABLE,
};
pub use io::{load_edge_list, read_edge_list, write_edge_list};
pub use knn::{build_knn_graph, build_knn_graph_with, KnnConfig};

/// Canonical key for an undirected pair.
fn pair(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    edges: BTreeMap<(usize, usize), f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    features: Option<Array2<f64>>,
}

impl Graph {
    /// Builds a graph from `(u, v, weight)` triples.
    ///
    /// Rejects self-loops, duplicate undirected pairs, out-of-range node ids
    /// and weights that are not strictly positive and finite.
    pub fn new<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u == v {
                return Err(Error::validation(format!("self-loop on node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            if map.insert(pair(u, v), w).is_some() {
                return Err(Error::validation(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self::from_map(num_nodes, map))
    }

    /// Unit-weight graph from plain pairs.
    pub fn from_pairs<I>(num_nodes: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(num_nodes, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    fn from_map(num_nodes: usize, edges: BTreeMap<(usize, usize), f64>) -> Self {
        let mut adjacency = vec![Vec::new(); num_nodes];
        for (&(u, v), &w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Graph {
            num_nodes,
            edges,
            adjacency,
            features: None,
        }
    }

    /// Attaches an `N x F` node-feature matrix.
    pub fn with_features(mut self, features: Array2<f64>) -> Result<Self> {
        if features.nrows() != self.num_nodes {
            return Err(Error::validation(format!(
                "feature matrix has {} rows, graph has {} nodes",
                features.nrows(),
                self.num_nodes
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn features(&self) -> Option<&Array2<f64>> {
        self.features.as_ref()
    }

    /// Edges as `(u, v, weight)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.edges.get(&pair(u, v)).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains_key(&pair(u, v))
    }

    /// True when every edge has weight exactly 1.
    pub fn is_unit_weight(&self) -> bool {
        self.edges.values().all(|&w| w == 1.0)
    }

    /// Returns a copy with the given undirected pairs toggled. Added edges get
    /// `added_weight`.
    pub fn with_flipped(&self, pairs: &[(usize, usize)], added_weight: f64) -> Result<Self> {
        let mut edges = self.edges.clone();
        for &(u, v) in pairs {
            if u == v || u >= self.num_nodes || v >= self.num_nodes {
                return Err(Error::argument(format!("cannot flip pair ({u}, {v})")));
            }
            let key = pair(u, v);
            if edges.remove(&key).is_none() {
                edges.insert(key, added_weight);
            }
        }
        let mut g = Self::from_map(self.num_nodes, edges);
        g.features = self.features.clone();
        Ok(g)
    }

    /// Subgraph induced by `nodes`; node `nodes[i]` becomes node `i`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.num_nodes];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let mut edges = BTreeMap::new();
        for (&(u, v), &w) in &self.edges {
            let (a, b) = (index[u], index[v]);
            if a != usize::MAX && b != usize::MAX {
                edges.insert(pair(a, b), w);
            }
        }
        let mut g = Self::from_map(nodes.len(), edges);
        g.features = self
            .features
            .as_ref()
            .map(|f| f.select(ndarray::Axis(0), nodes));
        g
    }

    /// Connected components, each sorted ascending; components are ordered
    /// by their smallest node.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_nodes];
        let mut components = Vec::new();
        for start in 0..self.num_nodes {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }
}

/// Result of [`largest_connected_component`].
#[derive(Clone, Debug)]
pub struct Component {
    pub graph: Graph,
    /// `original[new] = old` node id.
    pub original: Vec<usize>,
}

impl Component {
    /// Maps an original node id to its id in the component graph.
    pub fn new_index(&self, old: usize) -> Option<usize> {
        self.original.binary_search(&old).ok()
    }
}

/// Induced subgraph on the largest connected component, relabelled
/// contiguously in ascending original order. Equal-size components are
/// resolved in favour of the one holding the smallest original index.
pub fn largest_connected_component(g: &Graph) -> Component {
    let components = g.connected_components();
    // components are ordered by smallest member, so the first maximum wins
    let mut best: &[usize] = &[];
    for comp in &components {
        if comp.len() > best.len() {
            best = comp;
        }
    }
    Component {
        graph: g.induced_subgraph(best),
        original: best.to_vec(),
    }
}

fn check_same_size(g1: &Graph, g2: &Graph) -> Result<()> {
    if g1.num_nodes != g2.num_nodes {
        return Err(Error::argument(format!(
            "graphs differ in size: {} vs {}",
            g1.num_nodes, g2.num_nodes
        )));
    }
    Ok(())
}

/// Number of undirected node pairs whose adjacency differs.
pub fn adjacency_l1_distance(g1: &Graph, g2: &Graph) -> Result<usize> {
    check_same_size(g1, g2)?;
    let only_in_first = g1.edges.keys().filter(|k| !g2.edges.contains_key(k)).count();
    let only_in_second = g2.edges.keys().filter(|k| !g1.edges.contains_key(k)).count();
    Ok(only_in_first + only_in_second)
}

/// Entrywise L1 distance between weighted adjacency matrices, counted over
/// undirected pairs (absent edges weigh 0).
pub fn weighted_adjacency_l1_distance(g1: &Graph, g2: &Graph) -> Result<f64> {
    check_same_size(g1, g2)?;
    let mut total = 0.0;
    for (k, &w) in &g1.edges {
        total += (w - g2.edges.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &w) in &g2.edges {
        if !g1.edges.contains_key(k) {
            total += w;
        }
    }
    Ok(total)
}
