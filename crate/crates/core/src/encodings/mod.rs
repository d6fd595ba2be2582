//! Local and global witness-complex encodings of a graph.
//!
//! The local encoding gives every node the persistence image of the witness
//! complex built inside its cover cell. The global encoding is a single image
//! of the witness complex on all landmarks, witnessed by every node.

mod loss;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use ndarray::Array2;

use crate::complexes::witness_filtration;
use crate::error::{Error, Result};
use crate::graph::{geodesics, Graph};
use crate::landmarks::{build_cover, select_landmarks, Cover, LandmarkSet};
use crate::persistence::{compute_persistence, Algorithm, PersistenceDiagram};
use crate::vectorize::{persistence_image, PIConfig, PersistenceImage};

pub use loss::{topo_loss, topo_loss_grad, PointGradient, TopoLossConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodingConfig {
    /// Share of nodes promoted to landmarks, globally and inside each cell.
    pub fraction: f64,
    pub image: PIConfig,
    /// Homology dimension that gets vectorized (0 or 1). Filtrations are
    /// built one dimension higher so that its classes can die.
    pub homology_dim: usize,
    /// Lazy-witness relaxation; clamped to the landmark count of each complex.
    pub nu: usize,
    pub max_scale: f64,
    pub algorithm: Algorithm,
}

impl EncodingConfig {
    pub fn new(fraction: f64, image: PIConfig) -> Self {
        EncodingConfig {
            fraction,
            image,
            homology_dim: 0,
            nu: 0,
            max_scale: f64::INFINITY,
            algorithm: Algorithm::Reduction,
        }
    }

    fn simplex_dim(&self) -> Result<usize> {
        if self.homology_dim > 1 {
            return Err(Error::argument(format!(
                "homology dimension must be 0 or 1, got {}",
                self.homology_dim
            )));
        }
        Ok(self.homology_dim + 1)
    }
}

/// Witness-complex diagram on `landmarks` (node ids of `g`) with every node
/// of `g` acting as a witness, in dimensions up to `cfg.homology_dim`.
pub fn witness_diagram(g: &Graph, landmarks: &[usize], cfg: &EncodingConfig) -> Result<PersistenceDiagram> {
    let dists = geodesics(g, landmarks)?;
    let land = dists.columns(landmarks);
    let witnesses = dists.as_array().t().to_owned();
    let nu = cfg.nu.min(landmarks.len());
    let f = witness_filtration(&land, &witnesses, cfg.simplex_dim()?, cfg.max_scale, nu)?;
    Ok(compute_persistence(&f, cfg.algorithm)?.truncated(cfg.homology_dim))
}

#[derive(Clone, Debug)]
pub struct LocalDiagrams {
    pub cover: Cover,
    /// Keyed by cell owner.
    pub diagrams: BTreeMap<usize, PersistenceDiagram>,
}

pub fn local_diagrams(g: &Graph, cfg: &EncodingConfig) -> Result<LocalDiagrams> {
    let ls = select_landmarks(g, cfg.fraction)?;
    local_diagrams_with(g, &ls, cfg)
}

/// Like [`local_diagrams`] with a caller-chosen landmark set.
pub fn local_diagrams_with(g: &Graph, ls: &LandmarkSet, cfg: &EncodingConfig) -> Result<LocalDiagrams> {
    let cover = build_cover(g, ls)?;
    let mut diagrams = BTreeMap::new();
    for (&owner, members) in &cover.cells {
        let sub = g.induced_subgraph(members);
        let local: Vec<usize> = cover.local_landmarks[&owner]
            .iter()
            .map(|v| members.binary_search(v).expect("local landmark inside its cell"))
            .collect();
        diagrams.insert(owner, witness_diagram(&sub, &local, cfg)?);
    }
    Ok(LocalDiagrams { cover, diagrams })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Local,
    Global,
}

/// One row per node, `R * R` columns holding a row-major persistence image.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeFeatureMatrix {
    pub values: Array2<f64>,
    pub provenance: Provenance,
}

impl NodeFeatureMatrix {
    /// Every node receives the same global image.
    pub fn broadcast_global(image: &PersistenceImage, num_nodes: usize) -> Self {
        let row = image.flatten();
        let mut values = Array2::zeros((num_nodes, row.len()));
        for mut r in values.rows_mut() {
            r.assign(&ndarray::ArrayView1::from(&row));
        }
        NodeFeatureMatrix {
            values,
            provenance: Provenance::Global,
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.values.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Little-endian block: `u64` rows, `u64` columns, then row-major `f64`s.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let (rows, cols) = self.values.dim();
        out.write_all(&(rows as u64).to_le_bytes())?;
        out.write_all(&(cols as u64).to_le_bytes())?;
        for v in self.values.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the block written by [`NodeFeatureMatrix::write_binary`].
    pub fn read_binary<R: Read>(mut input: R, provenance: Provenance) -> Result<Self> {
        let mut word = [0u8; 8];
        input.read_exact(&mut word)?;
        let rows = u64::from_le_bytes(word) as usize;
        input.read_exact(&mut word)?;
        let cols = u64::from_le_bytes(word) as usize;
        let mut data = Vec::with_capacity(rows.saturating_mul(cols).min(1 << 24));
        for _ in 0..rows * cols {
            input.read_exact(&mut word)?;
            data.push(f64::from_le_bytes(word));
        }
        let values = Array2::from_shape_vec((rows, cols), data)
            .map_err(|e| Error::validation(e.to_string()))?;
        Ok(NodeFeatureMatrix { values, provenance })
    }
}

/// Images of cell diagrams broadcast to the members of each cell.
pub fn broadcast_local(local: &LocalDiagrams, num_nodes: usize, cfg: &EncodingConfig) -> Result<NodeFeatureMatrix> {
    let width = cfg.image.resolution * cfg.image.resolution;
    let mut values = Array2::zeros((num_nodes, width));
    for (owner, d) in &local.diagrams {
        let row = persistence_image(d, &cfg.image, cfg.homology_dim)?.flatten();
        let row = ndarray::ArrayView1::from(&row);
        for &v in &local.cover.cells[owner] {
            values.row_mut(v).assign(&row);
        }
    }
    Ok(NodeFeatureMatrix {
        values,
        provenance: Provenance::Local,
    })
}

pub fn local_encoding(g: &Graph, cfg: &EncodingConfig) -> Result<NodeFeatureMatrix> {
    broadcast_local(&local_diagrams(g, cfg)?, g.num_nodes(), cfg)
}

pub fn global_diagram(g: &Graph, cfg: &EncodingConfig) -> Result<(LandmarkSet, PersistenceDiagram)> {
    let ls = select_landmarks(g, cfg.fraction)?;
    let d = witness_diagram(g, &ls.landmarks, cfg)?;
    Ok((ls, d))
}

pub fn global_encoding(g: &Graph, cfg: &EncodingConfig) -> Result<PersistenceImage> {
    let (_, d) = global_diagram(g, cfg)?;
    persistence_image(&d, &cfg.image, cfg.homology_dim)
}
