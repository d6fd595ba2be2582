//! Assignment and bipartite-matching primitives for diagram distances.

use std::collections::VecDeque;

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns `assignment[row] = column`.
pub(super) fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based bookkeeping; column 0 is a sentinel
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    assignment
}

/// Hopcroft-Karp: true when the bipartite graph on `n + n` vertices given by
/// `adj[left] = right neighbours` has a perfect matching.
pub(super) fn has_perfect_matching(adj: &[Vec<usize>]) -> bool {
    const FREE: usize = usize::MAX;
    let n = adj.len();
    let mut match_left = vec![FREE; n];
    let mut match_right = vec![FREE; n];
    let mut dist = vec![0usize; n];
    let mut matched = 0;

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..n {
            if match_left[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = match_right[r];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        for l in 0..n {
            if match_left[l] == FREE && augment(l, adj, &mut match_left, &mut match_right, &mut dist) {
                matched += 1;
            }
        }
    }
    matched == n
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &r in &adj[l] {
        let next = match_right[r];
        let ok = next == usize::MAX
            || (dist[next] == dist[l] + 1 && augment(next, adj, match_left, match_right, dist));
        if ok {
            match_left[l] = r;
            match_right[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}
