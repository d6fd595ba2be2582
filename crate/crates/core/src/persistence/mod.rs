//! Persistence diagrams of filtrations and distances between them.

mod distance;
mod matching;
mod reduction;
mod union_find;

use serde::{Deserialize, Serialize};

use crate::complexes::Filtration;
use crate::error::{Error, Result};

pub use distance::{diagram_distance, diagram_distance_with, DistanceMode, EssentialMatching};

/// A birth/death pair. Essential classes never die and carry
/// `death = f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
    pub dimension: usize,
}

impl DiagramPoint {
    pub fn finite(birth: f64, death: f64, dimension: usize) -> Self {
        DiagramPoint {
            birth,
            death,
            dimension,
        }
    }

    pub fn essential(birth: f64, dimension: usize) -> Self {
        DiagramPoint {
            birth,
            death: f64::INFINITY,
            dimension,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PersistenceDiagram {
    /// Sorted by `(dimension, birth, death)`.
    points: Vec<DiagramPoint>,
    max_dim: usize,
}

impl PersistenceDiagram {
    /// Builds a diagram, dropping zero-persistence pairs and sorting.
    pub fn new(points: impl IntoIterator<Item = DiagramPoint>) -> Result<Self> {
        let mut pts = Vec::new();
        for p in points {
            if !(p.birth >= 0.0) || p.birth.is_infinite() || p.death.is_nan() {
                return Err(Error::validation(format!("invalid diagram point {p:?}")));
            }
            if p.death < p.birth {
                return Err(Error::validation(format!("death precedes birth in {p:?}")));
            }
            if p.death > p.birth {
                pts.push(p);
            }
        }
        Ok(Self::from_sorted(pts, 0))
    }

    fn from_sorted(mut points: Vec<DiagramPoint>, max_dim: usize) -> Self {
        points.sort_by(|a, b| {
            a.dimension
                .cmp(&b.dimension)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        let max_dim = points.iter().map(|p| p.dimension).max().unwrap_or(0).max(max_dim);
        PersistenceDiagram { points, max_dim }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    /// Highest homology dimension this diagram was computed for.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn dimension(&self, dim: usize) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dimension == dim)
    }

    /// Finite `(birth, death)` pairs in dimension `dim`.
    pub fn finite(&self, dim: usize) -> Vec<(f64, f64)> {
        self.dimension(dim)
            .filter(|p| !p.is_essential())
            .map(|p| (p.birth, p.death))
            .collect()
    }

    /// Births of essential classes in dimension `dim`.
    pub fn essential(&self, dim: usize) -> Vec<f64> {
        self.dimension(dim)
            .filter(|p| p.is_essential())
            .map(|p| p.birth)
            .collect()
    }

    /// Number of points in dimension `dim`.
    pub fn count(&self, dim: usize) -> usize {
        self.dimension(dim).count()
    }

    /// Replaces essential deaths by `max(cap, birth)`; classes born at or
    /// after the cap vanish.
    pub fn capped(&self, cap: f64) -> Self {
        let pts = self
            .points
            .iter()
            .filter_map(|p| {
                if !p.is_essential() {
                    return Some(*p);
                }
                (cap > p.birth).then(|| DiagramPoint::finite(p.birth, cap, p.dimension))
            })
            .collect();
        Self::from_sorted(pts, self.max_dim)
    }

    /// Only the finite points.
    pub fn without_essential(&self) -> Self {
        let pts = self.points.iter().filter(|p| !p.is_essential()).copied().collect();
        Self::from_sorted(pts, self.max_dim)
    }

    /// Keeps dimensions `0..=max_dim`. Useful for discarding the top
    /// dimension of a filtration, whose classes can never die.
    pub fn truncated(&self, max_dim: usize) -> Self {
        let pts = self.points.iter().filter(|p| p.dimension <= max_dim).copied().collect();
        let mut d = Self::from_sorted(pts, 0);
        d.max_dim = max_dim;
        d
    }

    /// One record per dimension, see [`DimensionRecord`].
    pub fn to_records(&self) -> Vec<DimensionRecord> {
        (0..=self.max_dim)
            .map(|dim| DimensionRecord {
                dim,
                points: self.finite(dim).into_iter().map(|(b, d)| [b, d]).collect(),
                essential: self.essential(dim),
            })
            .collect()
    }

    pub fn from_records(records: &[DimensionRecord]) -> Result<Self> {
        let mut pts = Vec::new();
        for r in records {
            pts.extend(r.points.iter().map(|&[b, d]| DiagramPoint::finite(b, d, r.dim)));
            pts.extend(r.essential.iter().map(|&b| DiagramPoint::essential(b, r.dim)));
        }
        let max_dim = records.iter().map(|r| r.dim).max().unwrap_or(0);
        let d = Self::new(pts)?;
        Ok(Self::from_sorted(d.points, max_dim))
    }

    /// JSON array of per-dimension records.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_records())?)
    }

    /// Accepts either a single record or an array of records.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum OneOrMany {
            One(DimensionRecord),
            Many(Vec<DimensionRecord>),
        }
        match serde_json::from_str(text)? {
            OneOrMany::One(r) => Self::from_records(&[r]),
            OneOrMany::Many(rs) => Self::from_records(&rs),
        }
    }
}

/// Serialized form of one homology dimension:
/// `{"dim":k,"points":[[b,d],...],"essential":[b,...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionRecord {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub essential: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Algorithm {
    /// Kruskal-style component merging; dimension 0 only.
    UnionFind,
    /// Column reduction of the boundary matrix over Z/2.
    #[default]
    Reduction,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "union-find" | "union_find" | "uf" => Ok(Algorithm::UnionFind),
            "reduction" => Ok(Algorithm::Reduction),
            other => Err(Error::argument(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Persistence diagram of `f`.
///
/// [`Algorithm::Reduction`] reports every dimension up to the filtration's
/// top simplex dimension; classes in that top dimension can never be killed
/// and appear as essential. [`Algorithm::UnionFind`] reports dimension 0 and
/// refuses filtrations carrying triangles, which exist only to resolve
/// 1-cycles.
pub fn compute_persistence(f: &Filtration, algorithm: Algorithm) -> Result<PersistenceDiagram> {
    match algorithm {
        Algorithm::Reduction => {
            let pts = reduction::persistence_pairs(f);
            Ok(PersistenceDiagram::from_sorted(pts, f.max_dim()))
        }
        Algorithm::UnionFind => {
            if f.max_dim() >= 2 {
                return Err(Error::argument(
                    "union-find computes dimension 0 only; use reduction for higher dimensions",
                ));
            }
            Ok(PersistenceDiagram::from_sorted(union_find::zero_dim_pairs(f), 0))
        }
    }
}
