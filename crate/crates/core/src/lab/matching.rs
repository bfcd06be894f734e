//! Eigenvalue pairing by bottleneck assignment.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matching<T> {
    /// `permutation[j]` is the index in `spec` paired with `spec0[j]`.
    pub permutation: Vec<usize>,
    /// `max_j |spec[permutation[j]] − spec0[j]|`.
    pub cost: T,
}

/// Kuhn's augmenting-path matching restricted to allowed edges.
struct Bipartite<'a> {
    allowed: &'a [Vec<bool>],
    owner: Vec<Option<usize>>,
    seen: Vec<bool>,
}

impl Bipartite<'_> {
    fn augment(&mut self, row: usize, banned_rows: &[bool], banned_cols: &[bool]) -> bool {
        for col in 0..self.allowed[row].len() {
            if !self.allowed[row][col] || self.seen[col] || banned_cols[col] {
                continue;
            }
            self.seen[col] = true;
            let free = match self.owner[col] {
                None => true,
                Some(r) => self.augment(r, banned_rows, banned_cols),
            };
            if free {
                self.owner[col] = Some(row);
                return true;
            }
        }
        false
    }
}

fn perfect_matching_exists(allowed: &[Vec<bool>], banned_rows: &[bool], banned_cols: &[bool]) -> bool {
    let n = allowed.len();
    let mut b = Bipartite {
        allowed,
        owner: vec![None; n],
        seen: vec![false; n],
    };
    for r in 0..n {
        if banned_rows[r] {
            continue;
        }
        b.seen.iter_mut().for_each(|s| *s = false);
        if !b.augment(r, banned_rows, banned_cols) {
            return false;
        }
    }
    true
}

/// Pairing minimising the largest distance. Among optimal pairings the
/// lexicographically smallest permutation is returned.
pub fn match_eigenvalues<T: Real>(spec0: &[Complex<T>], spec: &[Complex<T>]) -> Result<Matching<T>> {
    let n = spec0.len();
    if spec.len() != n {
        return Err(LabError::dims(format!("{n} eigenvalues"), format!("{}", spec.len())));
    }
    if n == 0 {
        return Ok(Matching { permutation: vec![], cost: T::zero() });
    }
    let cost: Vec<Vec<T>> = spec0
        .iter()
        .map(|a| spec.iter().map(|b| (*b - *a).norm()).collect())
        .collect();
    let mut levels: Vec<T> = cost.iter().flatten().copied().collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    levels.dedup();

    let allowed_at = |thr: T| -> Vec<Vec<bool>> {
        cost.iter().map(|row| row.iter().map(|c| *c <= thr).collect()).collect()
    };
    let none = vec![false; n];
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(&allowed_at(levels[mid]), &none, &none) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let thr = levels[lo];
    let mut allowed = allowed_at(thr);

    // lexicographic tie-break: fix rows in order, smallest feasible column first
    let mut banned_rows = vec![false; n];
    let mut banned_cols = vec![false; n];
    let mut permutation = vec![0; n];
    for r in 0..n {
        banned_rows[r] = true;
        let mut chosen = None;
        for c in 0..n {
            if !allowed[r][c] || banned_cols[c] {
                continue;
            }
            banned_cols[c] = true;
            if perfect_matching_exists(&allowed, &banned_rows, &banned_cols) {
                chosen = Some(c);
                break;
            }
            banned_cols[c] = false;
        }
        let c = chosen.expect("a perfect matching exists at the bottleneck threshold");
        permutation[r] = c;
        allowed[r].iter_mut().for_each(|a| *a = false);
        allowed[r][c] = true;
    }
    let cost = (0..n).fold(T::zero(), |m, r| m.max(cost[r][permutation[r]]));
    Ok(Matching { permutation, cost })
}
