//! Zero-dimensional persistence by merging components in filtration order.

use super::DiagramPoint;
use crate::complexes::Filtration;

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }
}

/// Roots are always the oldest vertex of their component (smallest
/// filtration position), so a merge kills the younger root. Vertices at equal
/// scale are ordered by index, giving the lower index seniority.
pub(super) fn zero_dim_pairs(f: &Filtration) -> Vec<DiagramPoint> {
    let simplices = f.simplices();
    let n = simplices
        .iter()
        .filter(|s| s.dim() == 0)
        .map(|s| s.vertices[0] + 1)
        .max()
        .unwrap_or(0);

    // position of each vertex in the filtration, and its birth scale
    let mut position = vec![usize::MAX; n];
    let mut birth = vec![0.0; n];
    for (i, s) in simplices.iter().enumerate() {
        if s.dim() == 0 {
            position[s.vertices[0]] = i;
            birth[s.vertices[0]] = s.scale;
        }
    }

    let mut sets = DisjointSet::new(n);
    let mut points = Vec::new();
    for s in simplices.iter().filter(|s| s.dim() == 1) {
        let (a, b) = (sets.find(s.vertices[0]), sets.find(s.vertices[1]));
        if a == b {
            continue;
        }
        let (elder, younger) = if position[a] < position[b] { (a, b) } else { (b, a) };
        if s.scale > birth[younger] {
            points.push(DiagramPoint::finite(birth[younger], s.scale, 0));
        }
        sets.parent[younger] = elder;
    }
    for v in 0..n {
        if position[v] != usize::MAX && sets.find(v) == v {
            points.push(DiagramPoint::essential(birth[v], 0));
        }
    }
    points
}
