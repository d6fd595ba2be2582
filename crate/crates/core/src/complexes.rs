//! Filtered Vietoris-Rips and lazy witness complexes on landmark sets.
//!
//! Both constructions are flag complexes: a simplex enters at the largest
//! scale among its edges. They differ only in how edge scales are computed.
//! Vertex indices in every simplex refer to landmark positions (columns of
//! the distance matrices), not graph node ids.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest simplex dimension the constructors will build.
pub const MAX_SIMPLEX_DIM: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    /// Strictly increasing.
    pub vertices: Vec<usize>,
    pub scale: f64,
}

impl Simplex {
    pub fn new(mut vertices: Vec<usize>, scale: f64) -> Self {
        vertices.sort_unstable();
        Simplex { vertices, scale }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces, each obtained by dropping one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let skip_all = self.vertices.len() <= 1;
        (0..self.vertices.len())
            .filter(move |_| !skip_all)
            .map(move |drop| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &v)| v)
                    .collect()
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    VietorisRips,
    Witness,
    /// Built directly from a simplex list.
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    num_vertices: usize,
    max_dim: usize,
    max_scale: f64,
    kind: ComplexKind,
    nu: usize,
}

fn filtration_order(a: &Simplex, b: &Simplex) -> std::cmp::Ordering {
    a.scale
        .total_cmp(&b.scale)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

impl Filtration {
    /// Validates and sorts an arbitrary simplex list. Every face of every
    /// simplex must be present with a scale no larger than its coface's.
    pub fn from_simplices(mut simplices: Vec<Simplex>, max_scale: f64) -> Result<Self> {
        let mut scale_of: HashMap<&[usize], f64> = HashMap::with_capacity(simplices.len());
        for s in &simplices {
            if s.vertices.is_empty() || s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation(format!(
                    "simplex {:?} must have strictly increasing vertices",
                    s.vertices
                )));
            }
            if !(s.scale >= 0.0) || s.scale.is_infinite() {
                return Err(Error::validation(format!("simplex {:?} has bad scale", s.vertices)));
            }
            if scale_of.insert(&s.vertices, s.scale).is_some() {
                return Err(Error::validation(format!("duplicate simplex {:?}", s.vertices)));
            }
        }
        for s in &simplices {
            for face in s.facets() {
                match scale_of.get(face.as_slice()) {
                    Some(&fs) if fs <= s.scale => {}
                    Some(_) => {
                        return Err(Error::validation(format!(
                            "face {face:?} enters after {:?}",
                            s.vertices
                        )))
                    }
                    None => {
                        return Err(Error::validation(format!(
                            "face {face:?} of {:?} is missing",
                            s.vertices
                        )))
                    }
                }
            }
        }
        drop(scale_of);
        simplices.sort_by(filtration_order);
        let max_dim = simplices.iter().map(Simplex::dim).max().unwrap_or(0);
        let num_vertices = simplices.iter().filter(|s| s.dim() == 0).count();
        Ok(Filtration {
            simplices,
            num_vertices,
            max_dim,
            max_scale,
            kind: ComplexKind::Custom,
            nu: 0,
        })
    }

    /// Sorted by `(scale, dimension, lexicographic vertices)`.
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Number of simplices.
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Simplices present at scale `alpha`.
    pub fn at_scale(&self, alpha: f64) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().take_while(move |s| s.scale <= alpha)
    }

    /// One JSON object per line: `{"vertices":[...],"scale":x}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for s in &self.simplices {
            serde_json::to_writer(&mut out, s)?;
            writeln!(out)?;
        }
        Ok(())
    }
}

fn check_max_dim(max_dim: usize) -> Result<()> {
    if max_dim > MAX_SIMPLEX_DIM {
        return Err(Error::argument(format!(
            "max_dim must be at most {MAX_SIMPLEX_DIM}, got {max_dim}"
        )));
    }
    Ok(())
}

fn check_max_scale(max_scale: f64) -> Result<()> {
    if !(max_scale >= 0.0) {
        return Err(Error::argument(format!("max_scale must be non-negative, got {max_scale}")));
    }
    Ok(())
}

/// Flag complex over `n` vertices from a symmetric edge-scale matrix.
/// Non-finite scales or scales above `max_scale` mean "no edge".
fn flag_filtration(
    edge_scales: &Array2<f64>,
    max_dim: usize,
    max_scale: f64,
    kind: ComplexKind,
    nu: usize,
) -> Filtration {
    let n = edge_scales.nrows();
    let present = |i: usize, j: usize| {
        let s = edge_scales[[i, j]];
        (s.is_finite() && s <= max_scale).then_some(s)
    };
    let mut simplices: Vec<Simplex> = (0..n).map(|v| Simplex::new(vec![v], 0.0)).collect();
    if max_dim >= 1 {
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if let Some(s) = present(i, j) {
                    simplices.push(Simplex {
                        vertices: vec![i, j],
                        scale: s,
                    });
                    neighbors[i].push((j, s));
                }
            }
        }
        if max_dim >= 2 {
            for i in 0..n {
                for (a, &(j, sij)) in neighbors[i].iter().enumerate() {
                    for &(k, sik) in &neighbors[i][a + 1..] {
                        if let Some(sjk) = present(j, k) {
                            simplices.push(Simplex {
                                vertices: vec![i, j, k],
                                scale: sij.max(sik).max(sjk),
                            });
                        }
                    }
                }
            }
        }
    }
    simplices.sort_by(filtration_order);
    Filtration {
        simplices,
        num_vertices: n,
        max_dim,
        max_scale,
        kind,
        nu,
    }
}

fn check_square_symmetric(d: &Array2<f64>) -> Result<()> {
    let n = d.nrows();
    if d.ncols() != n {
        return Err(Error::validation(format!(
            "distance matrix must be square, got {}x{}",
            n,
            d.ncols()
        )));
    }
    for i in 0..n {
        if d[[i, i]] != 0.0 {
            return Err(Error::validation(format!("non-zero diagonal at {i}")));
        }
        for j in i + 1..n {
            let (a, b) = (d[[i, j]], d[[j, i]]);
            if a.is_nan() || a < 0.0 {
                return Err(Error::validation(format!("invalid distance at ({i}, {j})")));
            }
            let same = a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
            if !same {
                return Err(Error::validation(format!(
                    "distance matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Vietoris-Rips filtration: an edge enters at its length, higher simplices
/// at their longest edge. Infinite (unreachable) pairs are never joined.
pub fn vr_filtration(dists: &Array2<f64>, max_dim: usize, max_scale: f64) -> Result<Filtration> {
    check_max_dim(max_dim)?;
    check_max_scale(max_scale)?;
    check_square_symmetric(dists)?;
    Ok(flag_filtration(dists, max_dim, max_scale, ComplexKind::VietorisRips, 0))
}

/// The relaxation `m_nu(w)`: distance from a witness to its `nu`-th nearest
/// landmark (`m_0 = 0`). Only finite distances are ranked; if fewer than `nu`
/// landmarks are reachable the farthest reachable one is used.
fn relaxation(row: ndarray::ArrayView1<f64>, nu: usize) -> f64 {
    if nu == 0 {
        return 0.0;
    }
    let mut finite: Vec<f64> = row.iter().copied().filter(|d| d.is_finite()).collect();
    if finite.is_empty() {
        return 0.0;
    }
    let k = nu.min(finite.len()) - 1;
    let (_, kth, _) = finite.select_nth_unstable_by(k, f64::total_cmp);
    *kth
}

/// Lazy witness edge scales:
/// `min_w max(0, max(d(w,i), d(w,j)) - m_nu(w))`.
pub fn witness_edge_scales(witness_dists: &Array2<f64>, nu: usize) -> Array2<f64> {
    let n = witness_dists.ncols();
    let mut scales = Array2::from_elem((n, n), f64::INFINITY);
    for i in 0..n {
        scales[[i, i]] = 0.0;
    }
    let mut flat = vec![f64::INFINITY; n * n];
    for row in witness_dists.rows() {
        let m = relaxation(row, nu);
        let row = row.to_vec();
        for i in 0..n {
            let di = row[i];
            if !di.is_finite() {
                continue;
            }
            let out = &mut flat[i * n..(i + 1) * n];
            for j in i + 1..n {
                let dj = row[j];
                let s = (di.max(dj) - m).max(0.0);
                if s < out[j] {
                    out[j] = s;
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = flat[i * n + j];
            scales[[i, j]] = s;
            scales[[j, i]] = s;
        }
    }
    scales
}

/// Lazy witness filtration on landmarks.
///
/// `land_dists` is the landmark-by-landmark geodesic matrix and
/// `witness_dists` the witness-by-landmark one; witness rows usually include
/// the landmarks themselves.
pub fn witness_filtration(
    land_dists: &Array2<f64>,
    witness_dists: &Array2<f64>,
    max_dim: usize,
    max_scale: f64,
    nu: usize,
) -> Result<Filtration> {
    check_max_dim(max_dim)?;
    check_max_scale(max_scale)?;
    check_square_symmetric(land_dists)?;
    if witness_dists.nrows() == 0 {
        return Err(Error::argument("witness set is empty"));
    }
    if witness_dists.ncols() != land_dists.nrows() {
        return Err(Error::validation(format!(
            "witness matrix has {} landmark columns, landmark matrix has {}",
            witness_dists.ncols(),
            land_dists.nrows()
        )));
    }
    if nu > land_dists.nrows() {
        return Err(Error::argument(format!(
            "nu = {nu} exceeds the number of landmarks ({})",
            land_dists.nrows()
        )));
    }
    let scales = witness_edge_scales(witness_dists, nu);
    Ok(flag_filtration(&scales, max_dim, max_scale, ComplexKind::Witness, nu))
}

/// Whether witness row `w` weakly witnesses `sigma`: every vertex of `sigma`
/// is at least as close to `w` as every landmark outside it.
pub fn is_weak_witness(w: usize, sigma: &[usize], cover_dists: &Array2<f64>) -> bool {
    let row = cover_dists.row(w);
    let inside = sigma.iter().map(|&v| row[v]).fold(f64::NEG_INFINITY, f64::max);
    if !inside.is_finite() {
        return false;
    }
    let outside = (0..row.len())
        .filter(|u| !sigma.contains(u))
        .map(|u| row[u])
        .fold(f64::INFINITY, f64::min);
    inside <= outside
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sandwich {
    Holds,
    Violated,
    /// `alpha <= 2 * epsilon`, outside the hypothesis of the containment.
    NotApplicable,
}

fn simplex_set(f: &Filtration) -> HashSet<Vec<usize>> {
    f.simplices().iter().map(|s| s.vertices.clone()).collect()
}

/// Checks `VR(alpha/3) ⊆ Wit(alpha) ⊆ VR(3 alpha)` as simplex sets.
pub fn sandwich_check(
    land_dists: &Array2<f64>,
    witness_dists: &Array2<f64>,
    alpha: f64,
    epsilon: f64,
    max_dim: usize,
    nu: usize,
) -> Result<Sandwich> {
    if !(alpha > 2.0 * epsilon) {
        return Ok(Sandwich::NotApplicable);
    }
    let low = simplex_set(&vr_filtration(land_dists, max_dim, alpha / 3.0)?);
    let mid = simplex_set(&witness_filtration(land_dists, witness_dists, max_dim, alpha, nu)?);
    let high = simplex_set(&vr_filtration(land_dists, max_dim, 3.0 * alpha)?);
    if low.is_subset(&mid) && mid.is_subset(&high) {
        Ok(Sandwich::Holds)
    } else {
        Ok(Sandwich::Violated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{geodesics, Graph};
    use ndarray::array;

    fn cycle(n: usize) -> Graph {
        Graph::from_pairs(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn listing(f: &Filtration) -> Vec<(Vec<usize>, f64)> {
        f.simplices().iter().map(|s| (s.vertices.clone(), s.scale)).collect()
    }

    #[test]
    fn vr_three_points() {
        let d = array![[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]];
        let f = vr_filtration(&d, 1, 2.0).unwrap();
        assert_eq!(
            listing(&f),
            vec![
                (vec![0], 0.0),
                (vec![1], 0.0),
                (vec![2], 0.0),
                (vec![0, 1], 1.0),
                (vec![0, 2], 2.0)
            ]
        );
    }

    #[test]
    fn vr_clique_rule_and_zero_scale() {
        let d = array![[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        let f = vr_filtration(&d, 2, 1.0).unwrap();
        assert_eq!(f.simplices().last().unwrap(), &Simplex::new(vec![0, 1, 2], 1.0));
        assert_eq!(f.len(), 7);
        let v = vr_filtration(&d, 2, 0.0).unwrap();
        assert!(v.simplices().iter().all(|s| s.dim() == 0));
    }

    #[test]
    fn vr_rejects_asymmetric_and_bad_dim() {
        let d = array![[0.0, 1.0], [2.0, 0.0]];
        assert!(matches!(vr_filtration(&d, 1, 1.0), Err(Error::Validation(_))));
        let ok = array![[0.0, 1.0], [1.0, 0.0]];
        assert!(matches!(vr_filtration(&ok, 3, 1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn vr_skips_unreachable_pairs() {
        let d = array![[0.0, f64::INFINITY], [f64::INFINITY, 0.0]];
        assert_eq!(vr_filtration(&d, 1, f64::INFINITY).unwrap().len(), 2);
    }

    /// Enumerates the definition directly: for each pair and each witness
    /// take the larger of the two distances, keep the smallest.
    fn brute_edge_scale(wd: &Array2<f64>, i: usize, j: usize) -> f64 {
        let mut best = f64::INFINITY;
        for w in 0..wd.nrows() {
            let v = wd[[w, i]].max(wd[[w, j]]);
            if v < best {
                best = v;
            }
        }
        best
    }

    fn cycle_matrices(landmarks: &[usize]) -> (Array2<f64>, Array2<f64>) {
        let g = cycle(6);
        let d = geodesics(&g, landmarks).unwrap();
        let land = d.columns(landmarks);
        let wit = d.as_array().t().to_owned();
        (land, wit)
    }

    #[test]
    fn six_cycle_witness_edges_enter_at_one() {
        let (land, wit) = cycle_matrices(&[0, 2, 4]);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(brute_edge_scale(&wit, i, j), 1.0);
        }
        let f = witness_filtration(&land, &wit, 2, f64::INFINITY, 0).unwrap();
        let edges: Vec<_> = f.simplices().iter().filter(|s| s.dim() == 1).collect();
        assert_eq!(edges.len(), 3);
        assert!(edges.iter().all(|s| s.scale == 1.0));
        assert_eq!(f.simplices().last().unwrap(), &Simplex::new(vec![0, 1, 2], 1.0));
    }

    #[test]
    fn single_landmark_is_one_vertex() {
        let (land, wit) = cycle_matrices(&[0]);
        let f = witness_filtration(&land, &wit, 2, f64::INFINITY, 0).unwrap();
        assert_eq!(listing(&f), vec![(vec![0], 0.0)]);
    }

    #[test]
    fn landmarks_as_only_witnesses_match_enumeration() {
        let g = Graph::from_pairs(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 5)])
            .unwrap();
        let landmarks = [1, 3, 5, 6];
        let d = geodesics(&g, &landmarks).unwrap();
        let land = d.columns(&landmarks);
        let wit = land.clone();
        let f = witness_filtration(&land, &wit, 1, f64::INFINITY, 0).unwrap();
        for s in f.simplices().iter().filter(|s| s.dim() == 1) {
            let (i, j) = (s.vertices[0], s.vertices[1]);
            assert_eq!(s.scale, brute_edge_scale(&wit, i, j));
            // with landmarks witnessing themselves the pair distance is an upper bound
            assert!(s.scale <= land[[i, j]]);
        }
        assert_eq!(f.simplices().iter().filter(|s| s.dim() == 1).count(), 6);
    }

    #[test]
    fn relaxation_lowers_scales() {
        let (land, wit) = cycle_matrices(&[0, 2, 4]);
        let f1 = witness_filtration(&land, &wit, 1, f64::INFINITY, 1).unwrap();
        // node 1 has m_1 = 1, so pair (0, 2) enters at 0
        assert!(f1.simplices().iter().filter(|s| s.dim() == 1).all(|s| s.scale == 0.0));
        assert!(witness_filtration(&land, &wit, 1, 1.0, 4).is_err());
    }

    #[test]
    fn witness_dimension_mismatch() {
        let (land, _) = cycle_matrices(&[0, 2, 4]);
        let bad = Array2::zeros((6, 2));
        assert!(matches!(
            witness_filtration(&land, &bad, 1, 1.0, 0),
            Err(Error::Validation(_))
        ));
        let empty = Array2::zeros((0, 3));
        assert!(witness_filtration(&land, &empty, 1, 1.0, 0).is_err());
    }

    #[test]
    fn weak_witness_examples() {
        let g = cycle(6);
        let d = geodesics(&g, &[0, 3]).unwrap();
        let wit = d.as_array().t().to_owned();
        assert!(is_weak_witness(1, &[0], &wit));
        assert!(is_weak_witness(4, &[0, 1], &wit));
        let d = geodesics(&g, &[0, 2, 4]).unwrap();
        let wit = d.as_array().t().to_owned();
        assert!(!is_weak_witness(3, &[0], &wit));
        for w in 0..6 {
            assert!(is_weak_witness(w, &[0, 1, 2], &wit));
        }
    }

    #[test]
    fn sandwich_not_applicable_below_threshold() {
        let (land, wit) = cycle_matrices(&[0, 2, 4]);
        assert_eq!(sandwich_check(&land, &wit, 2.0, 1.0, 2, 0).unwrap(), Sandwich::NotApplicable);
        assert_eq!(sandwich_check(&land, &wit, 3.0, 1.0, 2, 0).unwrap(), Sandwich::Holds);
    }

    #[test]
    fn custom_filtrations_are_validated() {
        let ok = Filtration::from_simplices(
            vec![
                Simplex::new(vec![0, 1], 2.0),
                Simplex::new(vec![0], 0.5),
                Simplex::new(vec![1], 1.0),
            ],
            f64::INFINITY,
        )
        .unwrap();
        assert_eq!(ok.simplices()[0].vertices, vec![0]);
        let late_face = Filtration::from_simplices(
            vec![
                Simplex::new(vec![0, 1], 1.0),
                Simplex::new(vec![0], 0.0),
                Simplex::new(vec![1], 2.0),
            ],
            f64::INFINITY,
        );
        assert!(late_face.is_err());
        let missing = Filtration::from_simplices(vec![Simplex::new(vec![0, 1], 1.0)], 1.0);
        assert!(missing.is_err());
    }

    #[test]
    fn jsonl_format() {
        let d = array![[0.0, 1.5], [1.5, 0.0]];
        let f = vr_filtration(&d, 1, 2.0).unwrap();
        let mut out = Vec::new();
        f.write_jsonl(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), r#"{"vertices":[0,1],"scale":1.5}"#);
    }
}
