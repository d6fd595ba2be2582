//! Degree-centrality landmarks and the Voronoi cover they induce.
//!
//! Landmarks are the top `floor(N * fraction)` nodes by degree. Every node is
//! then assigned to its geodesically nearest landmark, and inside each cell
//! the same degree ranking (on the induced subgraph) picks local landmarks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{geodesics, Graph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandmarkSet {
    /// Sorted by degree descending, then node id ascending.
    pub landmarks: Vec<usize>,
    pub fraction: f64,
}

impl LandmarkSet {
    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.landmarks.contains(&node)
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::argument(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    Ok(())
}

/// `floor(n * fraction)`, at least 1 and at most `n`.
///
/// A tiny slack absorbs products such as `0.29 * 100 = 28.999...`.
pub fn landmark_count(n: usize, fraction: f64) -> usize {
    let raw = (n as f64 * fraction + 1e-9).floor() as usize;
    raw.clamp(1, n.max(1))
}

/// Orders `nodes` by `(degree desc, id asc)`.
fn rank_by_degree(nodes: &mut [usize], degree: impl Fn(usize) -> usize) {
    nodes.sort_by(|&a, &b| degree(b).cmp(&degree(a)).then(a.cmp(&b)));
}

pub fn select_landmarks(g: &Graph, fraction: f64) -> Result<LandmarkSet> {
    check_fraction(fraction)?;
    if g.num_nodes() == 0 {
        return Err(Error::argument("graph has no nodes"));
    }
    let mut nodes: Vec<usize> = (0..g.num_nodes()).collect();
    rank_by_degree(&mut nodes, |u| g.degree(u));
    nodes.truncate(landmark_count(g.num_nodes(), fraction));
    Ok(LandmarkSet {
        landmarks: nodes,
        fraction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    pub landmarks: Vec<usize>,
    /// Cell owner -> sorted member nodes. Owners are landmarks, plus any node
    /// unreachable from every landmark, which covers only itself.
    pub cells: BTreeMap<usize, Vec<usize>>,
    /// Half the largest finite landmark-to-landmark geodesic.
    pub epsilon_pairwise: f64,
    /// Largest distance from a node to the landmark that owns its cell.
    pub cover_radius: f64,
    /// Size of the largest cell.
    pub c_epsilon: usize,
    /// Per-cell landmarks chosen by degree inside the induced cell subgraph.
    pub local_landmarks: BTreeMap<usize, Vec<usize>>,
    /// Nodes that no landmark reaches.
    pub unreachable: Vec<usize>,
    #[serde(skip)]
    owner: Vec<usize>,
}

impl Cover {
    /// The cell owner for `node`.
    pub fn owner(&self, node: usize) -> usize {
        self.owner[node]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn build_cover(g: &Graph, ls: &LandmarkSet) -> Result<Cover> {
    if ls.is_empty() {
        return Err(Error::argument("landmark set is empty"));
    }
    check_fraction(ls.fraction)?;
    let n = g.num_nodes();
    if let Some(&l) = ls.landmarks.iter().find(|&&l| l >= n) {
        return Err(Error::argument(format!("landmark {l} is not a node")));
    }
    let dist = geodesics(g, &ls.landmarks)?;

    let mut owner = vec![usize::MAX; n];
    let mut cover_radius: f64 = 0.0;
    let mut unreachable = Vec::new();
    for (v, slot) in owner.iter_mut().enumerate() {
        // strict `<` keeps the earliest-ranked landmark on ties
        let mut best: Option<(usize, f64)> = None;
        for (rank, &l) in ls.landmarks.iter().enumerate() {
            let d = dist.get(rank, v);
            if d.is_finite() && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((l, d));
            }
        }
        match best {
            Some((l, d)) => {
                *slot = l;
                cover_radius = cover_radius.max(d);
            }
            None => {
                *slot = v;
                unreachable.push(v);
            }
        }
    }

    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &o) in owner.iter().enumerate() {
        cells.entry(o).or_default().push(v);
    }

    let mut epsilon_pairwise: f64 = 0.0;
    for i in 0..ls.len() {
        for &l in &ls.landmarks[i + 1..] {
            let d = dist.get(i, l);
            if d.is_finite() {
                epsilon_pairwise = epsilon_pairwise.max(0.5 * d);
            }
        }
    }

    let local_landmarks = cells
        .iter()
        .map(|(&l, members)| (l, local_landmarks_in(g, members, ls.fraction)))
        .collect();
    let c_epsilon = cells.values().map(Vec::len).max().unwrap_or(0);

    Ok(Cover {
        landmarks: ls.landmarks.clone(),
        cells,
        epsilon_pairwise,
        cover_radius,
        c_epsilon,
        local_landmarks,
        unreachable,
        owner,
    })
}

/// Degree ranking restricted to the subgraph induced by `members`.
fn local_landmarks_in(g: &Graph, members: &[usize], fraction: f64) -> Vec<usize> {
    let sub = g.induced_subgraph(members);
    let mut local: Vec<usize> = (0..members.len()).collect();
    rank_by_degree(&mut local, |i| sub.degree(i));
    local.truncate(landmark_count(members.len(), fraction));
    local.into_iter().map(|i| members[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_pairs(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn counts_follow_floor_rule() {
        assert_eq!(landmark_count(2485, 0.05), 124);
        assert_eq!(landmark_count(19717, 0.02), 394);
        assert_eq!(landmark_count(100, 0.29), 29);
        assert_eq!(landmark_count(3, 0.1), 1);
    }

    #[test]
    fn degree_order_with_tie_rule() {
        // degrees [3, 1, 2, 3]
        let g = Graph::from_pairs(5, [(0, 1), (0, 2), (0, 3), (3, 2), (3, 4)]).unwrap();
        assert_eq!(&g.degrees()[..4], &[3, 1, 2, 3]);
        let g4 = Graph::from_pairs(4, [(0, 1), (0, 2), (0, 3), (3, 2), (3, 1)]).unwrap();
        let ls = select_landmarks(&g4, 0.5).unwrap();
        assert_eq!(g4.degrees(), vec![3, 2, 2, 3]);
        assert_eq!(ls.landmarks, vec![0, 3]);
        assert!(select_landmarks(&g, 0.0).is_err());
        assert!(select_landmarks(&g, 1.5).is_err());
    }

    fn with_landmarks(landmarks: Vec<usize>) -> LandmarkSet {
        LandmarkSet {
            landmarks,
            fraction: 0.5,
        }
    }

    #[test]
    fn six_cycle_two_landmarks() {
        let c = build_cover(&cycle(6), &with_landmarks(vec![0, 3])).unwrap();
        assert_eq!(c.cells[&0], vec![0, 1, 5]);
        assert_eq!(c.cells[&3], vec![2, 3, 4]);
        assert_eq!(c.c_epsilon, 3);
        assert_eq!(c.epsilon_pairwise, 1.5);
        assert_eq!(c.cover_radius, 1.0);
        assert_eq!(c.owner(5), 0);
    }

    #[test]
    fn all_landmarks_give_singletons() {
        let g = cycle(5);
        let c = build_cover(&g, &with_landmarks((0..5).collect())).unwrap();
        assert!(c.cells.values().all(|cell| cell.len() == 1));
        assert_eq!(c.c_epsilon, 1);
        assert_eq!(c.cover_radius, 0.0);
    }

    #[test]
    fn single_landmark_covers_everything() {
        let g = cycle(7);
        let c = build_cover(&g, &with_landmarks(vec![0])).unwrap();
        assert_eq!(c.cells[&0], (0..7).collect::<Vec<_>>());
        assert_eq!(c.cover_radius, 3.0);
        assert_eq!(c.epsilon_pairwise, 0.0);
    }

    #[test]
    fn unreachable_nodes_cover_themselves() {
        let g = Graph::from_pairs(4, [(0, 1)]).unwrap();
        let c = build_cover(&g, &with_landmarks(vec![0])).unwrap();
        assert_eq!(c.unreachable, vec![2, 3]);
        assert_eq!(c.cells[&2], vec![2]);
        assert_eq!(c.local_landmarks[&3], vec![3]);
        assert_eq!(c.cells.values().map(Vec::len).sum::<usize>(), 4);
    }

    #[test]
    fn tie_goes_to_earlier_landmark() {
        // node 1 is equidistant from 0 and 2
        let g = Graph::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        let c = build_cover(&g, &with_landmarks(vec![2, 0])).unwrap();
        assert_eq!(c.owner(1), 2);
    }

    #[test]
    fn empty_landmarks_rejected() {
        assert!(matches!(
            build_cover(&cycle(3), &with_landmarks(vec![])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn serialization_is_deterministic() {
        let g = cycle(9);
        let ls = select_landmarks(&g, 0.34).unwrap();
        let a = build_cover(&g, &ls).unwrap().to_json().unwrap();
        let b = build_cover(&g, &ls).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        for key in ["landmarks", "cells", "epsilon_pairwise", "cover_radius", "c_epsilon"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
