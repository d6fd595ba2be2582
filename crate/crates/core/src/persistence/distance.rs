//! Bottleneck and p-Wasserstein distances between persistence diagrams.
//!
//! The ground metric is L∞ in the (birth, death) plane, and any point may be
//! matched to the diagonal at cost `(death - birth) / 2`. Essential classes
//! are handled separately: by default they are matched among themselves by
//! sorted birth, and a mismatch in their number makes the distance infinite.

use super::matching::{has_perfect_matching, min_cost_assignment};
use super::PersistenceDiagram;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistanceMode {
    Bottleneck,
    /// Exponent `p >= 1`.
    Wasserstein(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EssentialMatching {
    /// Essential classes match only each other; unequal counts give `inf`.
    #[default]
    Match,
    /// Essential classes are ignored.
    Drop,
}

/// Distance restricted to homology dimension `dim`, with essential classes
/// matched among themselves.
pub fn diagram_distance(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    mode: DistanceMode,
    dim: usize,
) -> Result<f64> {
    diagram_distance_with(d1, d2, mode, dim, EssentialMatching::Match)
}

pub fn diagram_distance_with(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    mode: DistanceMode,
    dim: usize,
    essential: EssentialMatching,
) -> Result<f64> {
    if let DistanceMode::Wasserstein(p) = mode {
        if !(p >= 1.0) || p.is_infinite() {
            return Err(Error::argument(format!("Wasserstein exponent must be >= 1, got {p}")));
        }
    }
    let (a, b) = (d1.finite(dim), d2.finite(dim));

    let (ess_max, ess_sum) = match essential {
        EssentialMatching::Drop => (0.0, 0.0),
        EssentialMatching::Match => {
            let (mut ea, mut eb) = (d1.essential(dim), d2.essential(dim));
            if ea.len() != eb.len() {
                return Ok(f64::INFINITY);
            }
            ea.sort_by(f64::total_cmp);
            eb.sort_by(f64::total_cmp);
            let gaps: Vec<f64> = ea.iter().zip(&eb).map(|(x, y)| (x - y).abs()).collect();
            let max = gaps.iter().copied().fold(0.0, f64::max);
            let sum = match mode {
                DistanceMode::Wasserstein(p) => gaps.iter().map(|g| g.powf(p)).sum(),
                DistanceMode::Bottleneck => 0.0,
            };
            (max, sum)
        }
    };

    Ok(match mode {
        DistanceMode::Bottleneck => bottleneck_finite(&a, &b).max(ess_max),
        DistanceMode::Wasserstein(p) => (wasserstein_finite_pow(&a, &b, p) + ess_sum).powf(1.0 / p),
    })
}

fn linf(x: (f64, f64), y: (f64, f64)) -> f64 {
    (x.0 - y.0).abs().max((x.1 - y.1).abs())
}

fn to_diagonal(x: (f64, f64)) -> f64 {
    (x.1 - x.0) / 2.0
}

/// Ground costs for the diagonal-augmented square problem. Rows are the
/// points of `a` followed by one diagonal slot per point of `b`; columns are
/// the points of `b` followed by one diagonal slot per point of `a`.
fn augmented_costs(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let (n, m) = (a.len(), b.len());
    let size = n + m;
    let mut cost = vec![vec![0.0; size]; size];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = match (i < n, j < m) {
                (true, true) => linf(a[i], b[j]),
                (true, false) => to_diagonal(a[i]),
                (false, true) => to_diagonal(b[j]),
                (false, false) => 0.0,
            };
        }
    }
    cost
}

fn bottleneck_finite(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let cost = augmented_costs(a, b);
    let mut candidates: Vec<f64> = cost.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |threshold: f64| {
        let adj: Vec<Vec<usize>> = cost
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &c)| c <= threshold)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        has_perfect_matching(&adj)
    };

    // smallest candidate admitting a perfect matching; the largest always does
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Optimal `sum cost^p` over matchings.
fn wasserstein_finite_pow(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    let cost: Vec<Vec<f64>> = augmented_costs(a, b)
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.powf(p)).collect())
        .collect();
    let assignment = min_cost_assignment(&cost);
    assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
}
