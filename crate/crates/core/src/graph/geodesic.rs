//! Shortest-path (geodesic) distances.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::io::Write;

use ndarray::{Array2, ArrayView1};

use super::Graph;
use crate::error::{Error, Result};

/// Distance between nodes in different connected components.
pub const UNREACHABLE: f64 = f64::INFINITY;

/// Geodesic distances from an ordered list of source nodes to every node.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    sources: Vec<usize>,
    dists: Array2<f64>,
}

impl DistanceMatrix {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn num_nodes(&self) -> usize {
        self.dists.ncols()
    }

    /// `|sources| x N` matrix; entry `(i, v)` is `d(sources[i], v)`.
    pub fn as_array(&self) -> &Array2<f64> {
        &self.dists
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.dists.row(i)
    }

    pub fn get(&self, i: usize, v: usize) -> f64 {
        self.dists[[i, v]]
    }

    /// Columns restricted to `nodes`, giving a `|sources| x |nodes|` matrix.
    pub fn columns(&self, nodes: &[usize]) -> Array2<f64> {
        self.dists.select(ndarray::Axis(1), nodes)
    }

    /// Largest finite entry, 0 when there is none.
    pub fn max_finite(&self) -> f64 {
        self.dists
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    /// CSV with one row per source; unreachable entries are written as `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.dists.rows() {
            let line: Vec<String> = row
                .iter()
                .map(|&d| if d.is_finite() { d.to_string() } else { "inf".into() })
                .collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Traversal {
    /// Breadth-first search for unit-weight graphs, Dijkstra otherwise.
    #[default]
    Auto,
    /// Hop counts; only valid on unit-weight graphs.
    Bfs,
    Dijkstra,
}

pub fn geodesics(g: &Graph, sources: &[usize]) -> Result<DistanceMatrix> {
    geodesics_with(g, sources, Traversal::Auto)
}

pub fn geodesics_with(g: &Graph, sources: &[usize], traversal: Traversal) -> Result<DistanceMatrix> {
    if sources.is_empty() {
        return Err(Error::argument("geodesics need at least one source"));
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= g.num_nodes()) {
        return Err(Error::argument(format!("source {s} is not a node")));
    }
    let use_bfs = match traversal {
        Traversal::Auto => g.is_unit_weight(),
        Traversal::Bfs if !g.is_unit_weight() => {
            return Err(Error::argument("breadth-first traversal needs unit weights"))
        }
        Traversal::Bfs => true,
        Traversal::Dijkstra => false,
    };
    let n = g.num_nodes();
    let mut dists = Array2::from_elem((sources.len(), n), UNREACHABLE);
    for (i, &s) in sources.iter().enumerate() {
        let row = dists.row_mut(i);
        let row = row.into_slice().expect("standard layout");
        if use_bfs {
            bfs(g, s, row);
        } else {
            dijkstra(g, s, row);
        }
    }
    Ok(DistanceMatrix {
        sources: sources.to_vec(),
        dists,
    })
}

fn bfs(g: &Graph, source: usize, dist: &mut [f64]) {
    dist[source] = 0.0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1.0;
        for &(v, _) in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
}

#[derive(PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(g: &Graph, source: usize, dist: &mut [f64]) {
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([State { cost: 0.0, node: source }]);
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(v, w) in g.neighbors(node) {
            let next = cost + w;
            if next < dist[v] {
                dist[v] = next;
                heap.push(State { cost: next, node: v });
            }
        }
    }
}

/// Largest finite geodesic distance over all node pairs.
pub fn diameter(g: &Graph) -> f64 {
    if g.num_nodes() == 0 {
        return 0.0;
    }
    let all: Vec<usize> = (0..g.num_nodes()).collect();
    geodesics(g, &all).map(|d| d.max_finite()).unwrap_or(0.0)
}
