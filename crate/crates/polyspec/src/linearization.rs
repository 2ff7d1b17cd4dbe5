//! Differentials of multiplier maps at the power map `f_0(z) = z^d`.
//!
//! Monic centered polynomials `z^d + Σ_{k≤d−2} a_k z^k` are perturbations of
//! `f_0`. Its fixed points `α^j` (with `α = exp(2πi/(d−1))`) and its 2-cycles
//! (powers of `β = exp(2πi/(d²−1))`) continue holomorphically, and so do
//! their multipliers `ρ_j^{(1)}` and `ρ_j^{(2)}`. This module builds the
//! Jacobians `A_1 = (∂ρ_j^{(1)}/∂a_k)` and `A_2 = (∂ρ_j^{(2)}/∂a_k)` at `f_0`
//! in closed form, the product `A = A_2 A_1^{-1}`, and checks the
//! permutation identities satisfied by `A`:
//!
//! * `σ_0^{−k} ×_C A = τ_0^k ×_R A` for the cyclic shift `σ_0 = (0 … d−2)`
//!   and the permutation `τ_0` of 2-cycles induced by `z ↦ αz`;
//! * the only column permutations of `A` that can be undone by a row
//!   permutation are the powers of `σ_0`.
//!
//! Here `σ ×_C M` has columns `C_{σ^{-1}(0)}, …, C_{σ^{-1}(d−2)}` and
//! `τ ×_R M` has rows `R_{τ^{-1}(0)}, …`.
//!
//! Finite differences of tracked multipliers give an independent check of
//! the closed forms.

use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Complex matrix type used for all Jacobians.
pub type CMatrix = DMatrix<Complex64>;

/// Largest degree accepted by [`build_jacobians`].
pub const MAX_JACOBIAN_DEGREE: usize = 8;
/// Largest degree accepted by [`stabilizer_bruteforce`].
pub const MAX_STABILIZER_DEGREE: usize = 5;
/// Tolerance on `A_1 A_1^{-1} = I`.
pub const INVERSE_TOL: f64 = 1e-10;
/// Tolerance on the equivariance identity.
pub const EQUIVARIANCE_TOL: f64 = 1e-9;
/// Step of the central finite differences.
pub const FD_STEP: f64 = 1e-6;
/// Tolerance when matching a finite-difference Jacobian to a closed form.
pub const FD_TOL: f64 = 1e-5;
/// Relative tolerance for recognising a periodic point of `z^d`.
pub const PERIODIC_TOL: f64 = 1e-9;

/// `exp(2πi m / n)`.
fn root_of_unity(m: i64, n: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * m.rem_euclid(n) as f64 / n as f64)
}

/// `∂ρ/∂a_k` at `z^d` for the multiplier of the cycle through `z0`, a point
/// of period `p` (that is, `z0^{d^p} = z0`) on the unit circle:
/// `d^{p−1}(k − d) Σ_{j<p} z0^{d^j (k−d)}`.
pub fn gorbovickis_differential(d: usize, p: usize, z0: Complex64, k: usize) -> Result<Complex64> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("degree {d} < 2")));
    }
    if p == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    if k > d - 2 {
        return Err(Error::InvalidInput(format!("coefficient index {k} exceeds d − 2 = {}", d - 2)));
    }
    if !z0.is_finite() || (z0.norm() - 1.0).abs() > PERIODIC_TOL {
        return Err(Error::InvalidInput(format!("{z0} is not a nonzero periodic point of z^{d}")));
    }
    let dp = (d as u32)
        .checked_pow(p as u32)
        .ok_or_else(|| Error::InvalidInput(format!("d^p overflows for d = {d}, p = {p}")))?;
    if (z0.powu(dp) - z0).norm() > PERIODIC_TOL * dp as f64 {
        return Err(Error::InvalidInput(format!("{z0} is not periodic with period {p} for z^{d}")));
    }
    let e = k as i32 - d as i32;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut w = z0;
    for _ in 0..p {
        sum += w.powi(e);
        w = w.powu(d as u32);
    }
    Ok(sum * (e as f64) * (d as f64).powi(p as i32 - 1))
}

/// Closed-form Jacobians at `z^d` and their product.
#[derive(Debug, Clone)]
pub struct JacobianBundle {
    /// Degree.
    pub d: usize,
    /// `(d−1)×(d−1)` Jacobian of the fixed-point multipliers.
    pub a1: CMatrix,
    /// Inverse of `a1`, read off from the polynomials `P_k`.
    pub a1inv: CMatrix,
    /// `d(d−1)/2 × (d−1)` Jacobian of the period-2 multipliers.
    pub a2: CMatrix,
    /// `a2 · a1inv`.
    pub a: CMatrix,
    /// Exponents `m_j` with `w_j = β^{m_j}`, one per 2-cycle of `z^d`.
    pub rep_exponents: Vec<i64>,
    /// The representatives `w_j`.
    pub cycle_reps: Vec<Complex64>,
}

impl JacobianBundle {
    /// `d² − 1`, the order of `β`.
    fn beta_order(&self) -> i64 {
        (self.d * self.d - 1) as i64
    }
}

/// Exponents of `β` representing the 2-cycles of `z^d`: first `α^j β` for
/// `j < d−1`, then the smallest exponent of each unvisited cycle.
pub fn period_two_representatives(d: usize) -> Result<Vec<i64>> {
    let n = (d * d - 1) as i64;
    let d = d as i64;
    let cycle_of = |m: i64| {
        let a = m.rem_euclid(n);
        let b = (a * d).rem_euclid(n);
        a.min(b)
    };
    let mut reps = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for j in 0..d - 1 {
        let m = j * (d + 1) + 1;
        if !seen.insert(cycle_of(m)) {
            return Err(Error::CheckFailed(format!("α^{j}β repeats a 2-cycle")));
        }
        reps.push(m);
    }
    for m in 1..n {
        if m % (d + 1) == 0 || seen.contains(&cycle_of(m)) {
            continue;
        }
        seen.insert(cycle_of(m));
        reps.push(m);
    }
    let expected = (d * (d - 1) / 2) as usize;
    if reps.len() != expected {
        return Err(Error::CheckFailed(format!(
            "found {} period-2 cycles, expected {expected}",
            reps.len()
        )));
    }
    Ok(reps)
}

/// Coefficients of `P_k(T) = α^k Π_{j≠k} (T − α^j)/(α^k − α^j)` in increasing degree.
fn lagrange_coefficients(d: usize, k: usize) -> Vec<Complex64> {
    let n = (d - 1) as i64;
    let ak = root_of_unity(k as i64, n);
    let mut coeffs = vec![ak];
    for j in 0..d - 1 {
        if j == k {
            continue;
        }
        let aj = root_of_unity(j as i64, n);
        let scale = (ak - aj).inv();
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c * scale;
            next[i] -= c * aj * scale;
        }
        coeffs = next;
    }
    coeffs
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Build `A_1`, `A_1^{-1}`, `A_2` and `A` at `z^d` for `3 ≤ d ≤ 8`.
pub fn build_jacobians(d: usize) -> Result<JacobianBundle> {
    if !(3..=MAX_JACOBIAN_DEGREE).contains(&d) {
        return Err(Error::InvalidInput(format!("degree {d} outside 3..={MAX_JACOBIAN_DEGREE}")));
    }
    let n = d - 1;
    let di = d as i64;
    let a1 = CMatrix::from_fn(n, n, |j, k| {
        root_of_unity(j as i64 * (k as i64 - 1), n as i64) * (k as f64 - d as f64)
    });
    let mut a1inv = CMatrix::zeros(n, n);
    for k in 0..n {
        for (j, c) in lagrange_coefficients(d, k).into_iter().enumerate() {
            a1inv[(j, k)] = c / (j as f64 - d as f64);
        }
    }
    let direct = a1
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::CheckFailed("A_1 is singular".into()))?;
    let identity_err = max_abs_diff(&(&a1 * &a1inv), &CMatrix::identity(n, n));
    if identity_err > INVERSE_TOL {
        return Err(Error::CheckFailed(format!("A_1 A_1^-1 deviates from I by {identity_err:e}")));
    }
    let inverse_err = max_abs_diff(&direct, &a1inv);
    if inverse_err > INVERSE_TOL {
        return Err(Error::CheckFailed(format!(
            "Lagrange inverse differs from direct inverse by {inverse_err:e}"
        )));
    }
    let rep_exponents = period_two_representatives(d)?;
    let order = di * di - 1;
    let cycle_reps: Vec<Complex64> = rep_exponents.iter().map(|&m| root_of_unity(m, order)).collect();
    let a2 = CMatrix::from_fn(rep_exponents.len(), n, |j, k| {
        let e = k as i64 - di;
        let m = rep_exponents[j];
        (root_of_unity(m * e, order) + root_of_unity(m * di * e, order)) * (di * e) as f64
    });
    let a = &a2 * &a1inv;
    Ok(JacobianBundle { d, a1, a1inv, a2, a, rep_exponents, cycle_reps })
}

/// `F(T) = (T^{d−1}−1)/(T^d(T−1)) + (T^{d(d−1)}−1)/(T^{d²}(T^d−1))`.
pub fn first_column_function(d: usize, t: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let d32 = d as u32;
    let td = t.powu(d32);
    (t.powu(d32 - 1) - one) / (td * (t - one))
        + (t.powu(d32 * (d32 - 1)) - one) / (t.powu(d32 * d32) * (td - one))
}

/// Result of [`check_first_column`].
#[derive(Debug, Clone, Serialize)]
pub struct FirstColumnReport {
    /// Largest deviation of `A_{j,0}` from `(d/(d−1)) F(w_j)`.
    pub max_formula_error: f64,
    /// Smallest distance between two entries of the first column.
    pub min_separation: f64,
    /// Whether the entries are pairwise distinct.
    pub distinct: bool,
}

/// Compare the first column of `A` with `(d/(d−1)) F(w_j)` and measure how
/// well separated its entries are.
pub fn check_first_column(bundle: &JacobianBundle) -> FirstColumnReport {
    let d = bundle.d;
    let scale = d as f64 / (d as f64 - 1.0);
    let col: Vec<Complex64> = (0..bundle.a.nrows()).map(|j| bundle.a[(j, 0)]).collect();
    let max_formula_error = col
        .iter()
        .zip(&bundle.cycle_reps)
        .map(|(a, &w)| (a - first_column_function(d, w) * scale).norm())
        .fold(0.0, f64::max);
    let min_separation = col
        .iter()
        .tuple_combinations()
        .map(|(x, y)| (x - y).norm())
        .fold(f64::INFINITY, f64::min);
    FirstColumnReport { max_formula_error, min_separation, distinct: min_separation > 1e-6 }
}

/// The permutation `τ_0` of 2-cycles: `α w_j` lies on the cycle of `w_{τ_0(j)}`.
pub fn tau0(bundle: &JacobianBundle) -> Result<Vec<usize>> {
    let order = bundle.beta_order();
    let d = bundle.d as i64;
    let cycle_of = |m: i64| {
        let a = m.rem_euclid(order);
        a.min((a * d).rem_euclid(order))
    };
    let index: std::collections::HashMap<i64, usize> =
        bundle.rep_exponents.iter().enumerate().map(|(j, &m)| (cycle_of(m), j)).collect();
    bundle
        .rep_exponents
        .iter()
        .map(|&m| {
            index
                .get(&cycle_of(m + d + 1))
                .copied()
                .ok_or_else(|| Error::CheckFailed(format!("α·β^{m} is not on a listed cycle")))
        })
        .collect()
}

/// `σ_0^k` as a vector `i ↦ i + k mod n` (negative `k` allowed).
fn cyclic_power(n: usize, k: i64) -> Vec<usize> {
    (0..n).map(|i| (i as i64 + k).rem_euclid(n as i64) as usize).collect()
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn compose_power(perm: &[usize], k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..perm.len()).collect();
    for _ in 0..k {
        out = out.iter().map(|&i| perm[i]).collect();
    }
    out
}

/// `σ ×_C M`: column `i` of the result is column `σ^{-1}(i)` of `M`.
pub fn permute_columns(sigma: &[usize], m: &CMatrix) -> CMatrix {
    let inv = invert(sigma);
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, inv[c])])
}

/// `τ ×_R M`: row `i` of the result is row `τ^{-1}(i)` of `M`.
pub fn permute_rows(tau: &[usize], m: &CMatrix) -> CMatrix {
    let inv = invert(tau);
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(inv[r], c)])
}

/// Result of [`check_equivariance`].
#[derive(Debug, Clone, Serialize)]
pub struct EquivarianceReport {
    /// The permutation `τ_0`.
    pub tau0: Vec<usize>,
    /// Whether `τ_0(j) = j + 1 mod d−1` for `j < d−1`.
    pub tau0_shifts_first_reps: bool,
    /// Largest entry of `σ_0^{−k} ×_C A − τ_0^k ×_R A` for each `k`.
    pub residuals: Vec<f64>,
}

/// Check `σ_0^{−k} ×_C A = τ_0^k ×_R A` for every `k ∈ {0, …, d−2}`.
pub fn check_equivariance(bundle: &JacobianBundle) -> Result<EquivarianceReport> {
    let n = bundle.d - 1;
    let tau0 = tau0(bundle)?;
    let tau0_shifts_first_reps = (0..n).all(|j| tau0[j] == (j + 1) % n);
    let residuals: Vec<f64> = (0..n)
        .map(|k| {
            let lhs = permute_columns(&cyclic_power(n, -(k as i64)), &bundle.a);
            let rhs = permute_rows(&compose_power(&tau0, k), &bundle.a);
            max_abs_diff(&lhs, &rhs)
        })
        .collect();
    if !tau0_shifts_first_reps {
        return Err(Error::CheckFailed(format!("τ_0 = {tau0:?} does not shift w_0, …, w_{}", n - 1)));
    }
    if let Some((k, r)) = residuals.iter().enumerate().find(|(_, r)| **r > EQUIVARIANCE_TOL) {
        return Err(Error::CheckFailed(format!("equivariance fails at k = {k} (residual {r:e})")));
    }
    Ok(EquivarianceReport { tau0, tau0_shifts_first_reps, residuals })
}

/// Whether the rows of `m` are a permutation of the rows of `a`, entries
/// compared within `tol`.
fn rows_match(m: &CMatrix, a: &CMatrix, tol: f64) -> bool {
    let mut used = vec![false; a.nrows()];
    (0..m.nrows()).all(|r| {
        let hit = (0..a.nrows()).find(|&s| {
            !used[s] && (0..a.ncols()).all(|c| (m[(r, c)] - a[(s, c)]).norm() <= tol)
        });
        match hit {
            Some(s) => {
                used[s] = true;
                true
            }
            None => false,
        }
    })
}

/// All `σ ∈ S_{d−1}` such that `σ ×_C A = τ ×_R A` for some row permutation
/// `τ`, in lexicographic order. Requires `d ≤ 5`.
pub fn stabilizer_bruteforce(bundle: &JacobianBundle) -> Result<Vec<Vec<usize>>> {
    if bundle.d > MAX_STABILIZER_DEGREE {
        return Err(Error::InvalidInput(format!(
            "brute force limited to d ≤ {MAX_STABILIZER_DEGREE}"
        )));
    }
    let n = bundle.d - 1;
    let scale = bundle.a.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let tol = EQUIVARIANCE_TOL * scale;
    Ok((0..n)
        .permutations(n)
        .filter(|sigma| rows_match(&permute_columns(sigma, &bundle.a), &bundle.a, tol))
        .collect())
}

/// The cyclic group `⟨σ_0⟩ ⊂ S_{d−1}` in lexicographic order.
pub fn cyclic_group(d: usize) -> Vec<Vec<usize>> {
    let n = d - 1;
    let mut group: Vec<Vec<usize>> = (0..n).map(|k| cyclic_power(n, k as i64)).collect();
    group.sort();
    group
}

/// `f(z) = z^d + h z^k` together with its derivative.
fn perturbed(d: usize, k: usize, h: f64, z: Complex64) -> (Complex64, Complex64) {
    let zk = z.powu(k as u32);
    let zd = z.powu(d as u32);
    let dk = if k == 0 { Complex64::new(0.0, 0.0) } else { z.powu(k as u32 - 1) * k as f64 };
    (zd + zk * h, z.powu(d as u32 - 1) * d as f64 + dk * h)
}

/// Multiplier of the period-`p` point continued from `seed` for `z^d + h z^k`,
/// found by Newton's method on `f^p(z) − z`.
fn tracked_multiplier(d: usize, k: usize, h: f64, p: usize, seed: Complex64) -> Result<Complex64> {
    let orbit = |z: Complex64| {
        let mut w = z;
        let mut der = Complex64::new(1.0, 0.0);
        for _ in 0..p {
            let (v, dv) = perturbed(d, k, h, w);
            der *= dv;
            w = v;
        }
        (w, der)
    };
    let mut z = seed;
    for _ in 0..50 {
        let (w, der) = orbit(z);
        let step = (w - z) / (der - 1.0);
        z -= step;
        if step.norm() < 1e-15 {
            return Ok(orbit(z).1);
        }
    }
    let (w, der) = orbit(z);
    if (w - z).norm() < 1e-12 {
        Ok(der)
    } else {
        Err(Error::NoConvergence { iterations: 50, residual: (w - z).norm() })
    }
}

fn finite_difference(d: usize, p: usize, seeds: &[Complex64]) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(seeds.len(), d - 1);
    for (j, &seed) in seeds.iter().enumerate() {
        for k in 0..d - 1 {
            let plus = tracked_multiplier(d, k, FD_STEP, p, seed)?;
            let minus = tracked_multiplier(d, k, -FD_STEP, p, seed)?;
            m[(j, k)] = (plus - minus) / (2.0 * FD_STEP);
        }
    }
    Ok(m)
}

/// Result of [`finite_difference_check`].
#[derive(Debug, Clone, Serialize)]
pub struct FiniteDifferenceReport {
    /// Largest entrywise deviation between `A_1` and its finite-difference estimate.
    pub a1_error: f64,
    /// Largest entrywise deviation between `A_2` and its finite-difference estimate.
    pub a2_error: f64,
}

impl FiniteDifferenceReport {
    /// Whether both deviations are within [`FD_TOL`].
    pub fn pass(&self) -> bool {
        self.a1_error <= FD_TOL && self.a2_error <= FD_TOL
    }
}

/// Compare `A_1` and `A_2` with central finite differences of the tracked
/// multipliers of `z^d + h z^k`.
pub fn finite_difference_check(bundle: &JacobianBundle) -> Result<FiniteDifferenceReport> {
    let d = bundle.d;
    let fixed: Vec<Complex64> = (0..d - 1).map(|j| root_of_unity(j as i64, d as i64 - 1)).collect();
    let fd1 = finite_difference(d, 1, &fixed)?;
    let fd2 = finite_difference(d, 2, &bundle.cycle_reps)?;
    Ok(FiniteDifferenceReport {
        a1_error: max_abs_diff(&fd1, &bundle.a1),
        a2_error: max_abs_diff(&fd2, &bundle.a2),
    })
}

/// Tracked-multiplier finite difference of a single differential, used to
/// test [`gorbovickis_differential`] at arbitrary periodic points.
pub fn finite_difference_differential(d: usize, p: usize, z0: Complex64, k: usize) -> Result<Complex64> {
    let plus = tracked_multiplier(d, k, FD_STEP, p, z0)?;
    let minus = tracked_multiplier(d, k, -FD_STEP, p, z0)?;
    Ok((plus - minus) / (2.0 * FD_STEP))
}

/// Row-major `[re, im]` pairs of a complex matrix, for JSON output.
pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
    serde_json::json!(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn differential_examples() {
        let v = gorbovickis_differential(2, 1, Complex64::new(1.0, 0.0), 0).unwrap();
        assert!((v - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        let z0 = root_of_unity(1, 3);
        let v = gorbovickis_differential(4, 1, z0, 1).unwrap();
        assert!((v - z0.powi(-3) * -3.0).norm() < 1e-12);
    }

    #[test]
    fn differential_rejects_non_periodic_points() {
        assert!(gorbovickis_differential(3, 1, Complex64::new(0.0, 0.0), 0).is_err());
        assert!(gorbovickis_differential(3, 2, root_of_unity(1, 7), 0).is_err());
        assert!(gorbovickis_differential(3, 1, Complex64::new(1.0, 0.0), 2).is_err());
    }

    #[test]
    fn inverse_holds_up_to_degree_eight() {
        for d in 3..=8 {
            let b = build_jacobians(d).unwrap();
            let err = max_abs_diff(&(&b.a1 * &b.a1inv), &CMatrix::identity(d - 1, d - 1));
            assert!(err < INVERSE_TOL, "d = {d}: {err:e}");
            assert_eq!(b.cycle_reps.len(), d * (d - 1) / 2);
        }
        assert!(build_jacobians(2).is_err());
        assert!(build_jacobians(9).is_err());
    }

    #[test]
    fn representatives_cover_all_two_cycles() {
        for d in 3..=8 {
            let n = (d * d - 1) as i64;
            let reps = period_two_representatives(d).unwrap();
            let mut points: Vec<i64> =
                reps.iter().flat_map(|&m| [m.rem_euclid(n), (m * d as i64).rem_euclid(n)]).collect();
            points.sort();
            let expected: Vec<i64> = (1..n).filter(|m| m % (d as i64 + 1) != 0).collect();
            assert_eq!(points, expected);
            for j in 0..d - 1 {
                assert_eq!(reps[j], j as i64 * (d as i64 + 1) + 1);
            }
        }
    }

    #[test]
    fn first_column_formula_and_distinctness() {
        for d in 3..=8 {
            let r = check_first_column(&build_jacobians(d).unwrap());
            assert!(r.max_formula_error < 1e-9, "d = {d}: {r:?}");
            assert!(r.distinct, "d = {d}: {r:?}");
        }
    }

    #[test]
    fn closed_forms_match_finite_differences() {
        for d in 3..=5 {
            let r = finite_difference_check(&build_jacobians(d).unwrap()).unwrap();
            assert!(r.pass(), "d = {d}: {r:?}");
        }
    }

    #[test]
    fn equivariance_holds() {
        for d in 3..=8 {
            let b = build_jacobians(d).unwrap();
            let r = check_equivariance(&b).unwrap();
            assert!(r.tau0_shifts_first_reps);
            assert_eq!(r.residuals[0], 0.0);
            assert!(r.residuals.iter().all(|x| *x < EQUIVARIANCE_TOL), "d = {d}: {r:?}");
        }
    }

    #[test]
    fn stabilizer_is_cyclic() {
        for (d, order) in [(3, 2), (4, 3), (5, 4)] {
            let b = build_jacobians(d).unwrap();
            let s = stabilizer_bruteforce(&b).unwrap();
            assert_eq!(s.len(), order);
            assert_eq!(s, cyclic_group(d));
        }
        assert!(stabilizer_bruteforce(&build_jacobians(6).unwrap()).is_err());
    }

    #[test]
    fn single_differentials_match_finite_differences() {
        for d in 2..=5usize {
            for p in 1..=2usize {
                let n = (d.pow(p as u32) - 1) as i64;
                for m in [1, n - 1] {
                    let z0 = root_of_unity(m, n);
                    for k in 0..=d - 2 {
                        let exact = gorbovickis_differential(d, p, z0, k).unwrap();
                        let fd = finite_difference_differential(d, p, z0, k).unwrap();
                        assert!((exact - fd).norm() < FD_TOL, "d={d} p={p} m={m} k={k}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn period_one_differential_is_single_term(d in 2usize..8, j in 0i64..7, k in 0usize..6) {
            prop_assume!(k <= d - 2);
            let z0 = root_of_unity(j, d as i64 - 1);
            let e = k as i32 - d as i32;
            let v = gorbovickis_differential(d, 1, z0, k).unwrap();
            prop_assert!((v - z0.powi(e) * e as f64).norm() < 1e-12);
        }
    }
}
