//! Tolerance-aware comparison of complex multisets.
//!
//! Two multisets are matched by solving the assignment problem on pairwise
//! distances (Hungarian algorithm with potentials), then comparing the largest
//! matched distance against the tolerance.

use crate::error::{Error, Result};
use crate::poly_core::field::C64;

/// Default absolute tolerance, applied after normalization by
/// `max(1, largest magnitude)`.
pub const DEFAULT_MATCH_TOL: f64 = 1e-8;

/// Outcome of [`multiset_match`].
#[derive(Clone, Debug, PartialEq)]
pub struct MatchReport {
    /// Largest matched distance is below the tolerance.
    pub matched: bool,
    /// `assignment[i]` is the index in `B` paired with `A[i]`.
    pub assignment: Vec<usize>,
    /// Largest normalized distance among matched pairs.
    pub max_distance: f64,
}

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns `assignment[row] = column`. Runs in `O(n^3)`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials formulation; column 0 is a virtual start.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    assignment
}

/// Compare two multisets of complex numbers up to `tol`.
///
/// Distances are divided by `max(1, max|x|)` over both multisets before the
/// comparison. The reported assignment minimizes the sum of squared distances
/// unless a different pairing is needed to stay within `tol`.
pub fn multiset_match(a: &[C64], b: &[C64], tol: f64) -> Result<MatchReport> {
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch(a.len(), b.len()));
    }
    let scale = a.iter().chain(b).map(|z| z.norm()).fold(1.0f64, f64::max);
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| ((x - y).norm() / scale).powi(2)).collect())
        .collect();
    let worst = |asg: &[usize]| {
        asg.iter()
            .enumerate()
            .map(|(i, &j)| (a[i] - b[j]).norm() / scale)
            .fold(0.0f64, f64::max)
    };
    let assignment = hungarian(&cost);
    let max_distance = worst(&assignment);
    if max_distance < tol {
        return Ok(MatchReport { matched: true, assignment, max_distance });
    }
    // The squared-distance optimum can trade one long edge for many short
    // ones; a threshold assignment settles whether any pairing fits.
    let threshold: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| if (x - y).norm() / scale < tol { 0.0 } else { 1.0 }).collect())
        .collect();
    let alt = hungarian(&threshold);
    let alt_distance = worst(&alt);
    if alt_distance < tol {
        Ok(MatchReport { matched: true, assignment: alt, max_distance: alt_distance })
    } else {
        Ok(MatchReport { matched: false, assignment, max_distance })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn re(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn permutation_invariance_and_sensitivity() {
        assert!(multiset_match(&re(&[1.0, 2.0]), &re(&[2.0, 1.0]), 1e-9).unwrap().matched);
        assert!(!multiset_match(&re(&[1.0]), &re(&[1.0 + 1e-6]), 1e-9).unwrap().matched);
        assert_eq!(
            multiset_match(&re(&[1.0]), &re(&[1.0, 2.0]), 1e-9),
            Err(Error::CardinalityMismatch(1, 2))
        );
    }

    #[test]
    fn hungarian_finds_optimum() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_reflexive(v in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
                                   w in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
                                   tol in 1e-12f64..1.0) {
            let a: Vec<C64> = v.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            prop_assert!(multiset_match(&a, &a, tol).unwrap().matched);
            if v.len() == w.len() {
                let b: Vec<C64> = w.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
                prop_assert_eq!(multiset_match(&a, &b, tol).unwrap().matched,
                                multiset_match(&b, &a, tol).unwrap().matched);
            }
        }
    }
}
