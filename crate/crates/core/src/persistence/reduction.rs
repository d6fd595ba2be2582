//! Standard column reduction of the Z/2 boundary matrix.

use std::collections::HashMap;

use super::DiagramPoint;
use crate::complexes::Filtration;

/// Symmetric difference of two sorted index lists.
fn add_columns(target: &mut Vec<usize>, source: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < source.len() {
        match target[i].cmp(&source[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(source[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&source[j..]);
    std::mem::swap(target, scratch);
}

pub(super) fn persistence_pairs(f: &Filtration) -> Vec<DiagramPoint> {
    let simplices = f.simplices();
    let index: HashMap<&[usize], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i))
        .collect();

    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            let mut col: Vec<usize> = s.facets().map(|face| index[face.as_slice()]).collect();
            col.sort_unstable();
            col
        })
        .collect();

    // pivot_of[row] = column whose lowest entry is `row`
    let mut pivot_of: Vec<Option<usize>> = vec![None; simplices.len()];
    let mut killed = vec![false; simplices.len()];
    let mut scratch = Vec::new();
    let mut points = Vec::new();

    for j in 0..columns.len() {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match pivot_of[low] {
                Some(k) => add_columns(&mut col, &columns[k], &mut scratch),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_of[low] = Some(j);
            killed[low] = true;
            let (birth, death) = (simplices[low].scale, simplices[j].scale);
            if death > birth {
                points.push(DiagramPoint::finite(birth, death, simplices[low].dim()));
            }
        }
        columns[j] = col;
    }

    for (i, s) in simplices.iter().enumerate() {
        if columns[i].is_empty() && !killed[i] {
            points.push(DiagramPoint::essential(s.scale, s.dim()));
        }
    }
    points
}
