use nalgebra::DMatrix;

use super::Permutation;
use crate::error::{Error, Result};

/// Dense `m × m` real block.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareBlock(pub DMatrix<f64>);

impl SquareBlock {
    pub fn zeros(m: usize) -> Self {
        SquareBlock(DMatrix::zeros(m, m))
    }

    pub fn from_row_slice(m: usize, data: &[f64]) -> Result<Self> {
        if data.len() != m * m {
            return Err(Error::SizeMismatch {
                expected: m * m,
                got: data.len(),
            });
        }
        Ok(SquareBlock(DMatrix::from_row_slice(m, m, data)))
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        let m = p.size();
        let mut b = DMatrix::zeros(m, m);
        for (r, &c) in p.map().iter().enumerate() {
            b[(r, c)] = 1.0;
        }
        SquareBlock(b)
    }

    /// Constant block with every entry `value`.
    pub fn constant(m: usize, value: f64) -> Self {
        SquareBlock(DMatrix::from_element(m, m, value))
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// Adds `weight · P` in place.
    #[inline]
    pub fn add_permutation(&mut self, p: &Permutation, weight: f64) {
        for (r, &c) in p.map().iter().enumerate() {
            self.0[(r, c)] += weight;
        }
    }

    /// `⟨self, P⟩`.
    pub fn inner_permutation(&self, p: &Permutation) -> f64 {
        p.map()
            .iter()
            .enumerate()
            .map(|(r, &c)| self.0[(r, c)])
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Projects a score block onto the permutations: returns the maximizer of
/// `⟨P, M⟩`, breaking ties towards the lexicographically smallest map.
pub fn project_to_permutation(block: &SquareBlock) -> Result<Permutation> {
    if !block.is_finite() {
        return Err(Error::input("score block has a non-finite entry"));
    }
    let m = block.size();
    if m == 0 {
        return Err(Error::input("score block is empty"));
    }
    let map = hungarian_max(&block.0);
    Ok(Permutation { map })
}

/// Maximum-score assignment for a square matrix (no finiteness checks).
///
/// Runs the O(m³) shortest augmenting path method on the negated scores, then
/// selects the lexicographically smallest perfect matching among the edges that
/// are tight under the optimal dual potentials. Every optimal assignment lives
/// on that tight subgraph, so this picks the smallest optimal map.
pub fn hungarian_max(score: &DMatrix<f64>) -> Vec<usize> {
    let n = score.nrows();
    let max_abs = score.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cost = |i: usize, j: usize| -score[(i, j)];

    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }

    let tol = 1e-9 * max_abs;
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| cost(i, j) - u[i + 1] - v[j + 1] <= tol)
                .collect()
        })
        .collect();
    if tight.iter().all(|row| row.len() == 1) {
        return assignment;
    }
    lexicographic_matching(&tight).unwrap_or(assignment)
}

/// Lexicographically smallest perfect matching of a bipartite graph given by
/// row adjacency lists sorted ascending.
fn lexicographic_matching(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut fixed: Vec<usize> = Vec::with_capacity(n);
    let mut col_used = vec![false; n];
    for r in 0..n {
        let mut chosen = None;
        for &c in &adj[r] {
            if col_used[c] {
                continue;
            }
            col_used[c] = true;
            if has_perfect_matching(adj, r + 1, &col_used) {
                chosen = Some(c);
                break;
            }
            col_used[c] = false;
        }
        fixed.push(chosen?);
    }
    Some(fixed)
}

/// Whether rows `start..n` can be matched into the columns not yet blocked.
fn has_perfect_matching(adj: &[Vec<usize>], start: usize, blocked: &[bool]) -> bool {
    let n = adj.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];

    fn augment(
        r: usize,
        adj: &[Vec<usize>],
        blocked: &[bool],
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for &c in &adj[r] {
            if blocked[c] || seen[c] {
                continue;
            }
            seen[c] = true;
            if match_col[c].is_none_or(|r2| augment(r2, adj, blocked, seen, match_col)) {
                match_col[c] = Some(r);
                return true;
            }
        }
        false
    }

    for r in start..n {
        let mut seen = vec![false; n];
        if !augment(r, adj, blocked, &mut seen, &mut match_col) {
            return false;
        }
    }
    true
}
