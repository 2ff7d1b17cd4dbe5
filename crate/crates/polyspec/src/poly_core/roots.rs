//! Simultaneous root finding by the Aberth–Ehrlich iteration.
//!
//! The iteration only needs the Newton correction `P(z)/P′(z)` at each
//! approximation, so it runs unchanged on polynomials that are only available
//! implicitly (dynatomic polynomials evaluated through iterates of `f`). The
//! [`RootOracle`] trait captures that interface.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly_core::ext::{eval_with_bound, ExtC};
use crate::poly_core::field::{cdiv, Rational, C64};
use crate::poly_core::poly::Poly;

/// Iteration cap of the simultaneous iteration.
pub const MAX_ITERATIONS: usize = 500;
/// Residual tolerance, relative to `Σ|a_k||r|^k`, that every returned root of an
/// explicit polynomial satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Newton data of a polynomial at one point.
#[derive(Clone, Copy, Debug)]
pub struct NewtonStep {
    /// `P(z)/P′(z)`; may be non-finite at critical points of `P`.
    pub step: C64,
    /// The point is a root to working precision.
    pub converged: bool,
    /// Residual relative to the evaluation error scale (diagnostics only).
    pub residual: f64,
}

/// A polynomial that can be queried for Newton corrections.
pub trait RootOracle: Sync {
    /// Number of roots counted with multiplicity.
    fn degree(&self) -> usize;
    /// Newton correction at `z`.
    fn newton(&self, z: C64) -> NewtonStep;
}

/// Aberth–Ehrlich iteration from the given starting configuration.
///
/// Converged approximations are frozen. An error is returned if some
/// approximation has not converged after `max_iter` sweeps.
pub fn aberth<O: RootOracle>(oracle: &O, z: Vec<C64>, max_iter: usize, seed: u64) -> Result<Vec<C64>> {
    let (z, worst) = aberth_sweeps(oracle, z, max_iter, seed)?;
    match worst {
        None => Ok(z),
        Some(residual) => Err(Error::NoConvergence { iterations: max_iter, residual }),
    }
}

/// Like [`aberth`], but returns the final configuration even when some
/// approximation has not converged, together with the worst residual of the
/// unconverged ones (`None` when all converged).
pub fn aberth_sweeps<O: RootOracle>(
    oracle: &O,
    mut z: Vec<C64>,
    max_iter: usize,
    seed: u64,
) -> Result<(Vec<C64>, Option<f64>)> {
    let n = z.len();
    if n != oracle.degree() {
        return Err(Error::InvalidInput(format!(
            "{} starting points for {} roots",
            n,
            oracle.degree()
        )));
    }
    if n == 0 {
        return Ok((z, None));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let mut done = vec![false; n];
    let mut worst = f64::INFINITY;
    for _ in 0..max_iter {
        let steps: Vec<Option<NewtonStep>> = z
            .par_iter()
            .zip(done.par_iter())
            .map(|(&zi, &d)| if d { None } else { Some(oracle.newton(zi)) })
            .collect();
        worst = 0.0;
        let mut pending = false;
        let snapshot = z.clone();
        for i in 0..n {
            let Some(nw) = steps[i] else { continue };
            if nw.converged {
                done[i] = true;
                continue;
            }
            pending = true;
            worst = f64::max(worst, nw.residual);
            let w = nw.step;
            let one = Complex64::new(1.0, 0.0);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in snapshot.iter().enumerate() {
                if j != i {
                    s += cdiv(one, snapshot[i] - zj);
                }
            }
            let corr = cdiv(w, one - w * s);
            if corr.re.is_finite() && corr.im.is_finite() && w.re.is_finite() && w.im.is_finite() {
                z[i] = snapshot[i] - corr;
            } else {
                // Stationary point of P or collision: nudge and retry.
                let scale = snapshot[i].norm().max(1e-8) * 1e-6;
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                z[i] = snapshot[i] + Complex64::from_polar(scale, theta);
            }
        }
        if !pending {
            return Ok((z, None));
        }
    }
    Ok((z, Some(worst)))
}

/// `n` points on a circle with a seeded random rotation and small jitter.
pub fn circle_start(n: usize, center: C64, radius: f64, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = rng.random::<f64>() * std::f64::consts::TAU;
    (0..n)
        .map(|k| {
            let jitter = 1.0 + 0.05 * (rng.random::<f64>() - 0.5);
            let theta = offset + std::f64::consts::TAU * (k as f64 + 0.25 * rng.random::<f64>()) / n as f64;
            center + Complex64::from_polar(radius * jitter, theta)
        })
        .collect()
}

/// An explicit polynomial with extended-range coefficients.
struct ExplicitOracle<'a> {
    coeffs: &'a [ExtC],
}

impl RootOracle for ExplicitOracle<'_> {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn newton(&self, z: C64) -> NewtonStep {
        let (p, dp, bound) = eval_with_bound(self.coeffs, z);
        let noise = 8.0 * self.coeffs.len() as f64 * f64::EPSILON;
        let rel = if bound.is_zero() { 0.0 } else { p.abs().div_to_c64(&bound).re };
        let step = if dp.is_zero() {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            p.div_to_c64(&dp)
        };
        NewtonStep { step, converged: p.is_zero() || rel <= noise, residual: rel }
    }
}

/// Starting radii from the upper convex hull of `(k, log|a_k|)`.
///
/// Each hull edge from `i` to `j` contributes `j − i` starting points on a
/// circle whose radius matches the edge slope.
fn hull_start(coeffs: &[ExtC], seed: u64) -> Vec<C64> {
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.log2_abs()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    for (s, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let radius = ((li - lj) / (j - i) as f64).exp2();
        let radius = radius.clamp(1e-300, 1e300);
        out.extend(circle_start(j - i, Complex64::new(0.0, 0.0), radius, seed.wrapping_add(s as u64)));
    }
    out
}

/// Roots of a polynomial given by extended-range coefficients (low-to-high).
///
/// Exact zero roots are split off first. Each returned root satisfies
/// `|P(r)| ≤ 1e−10 · Σ|a_k||r|^k`.
pub fn ext_roots(coeffs: &[ExtC], seed: u64) -> Result<Vec<C64>> {
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].is_zero() {
        hi -= 1;
    }
    if hi <= 1 {
        return Err(Error::InvalidInput("root finding needs degree ≥ 1".into()));
    }
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    let core = &coeffs[zeros..hi];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if core.len() > 1 {
        let oracle = ExplicitOracle { coeffs: core };
        let mut found = aberth(&oracle, hull_start(core, seed), MAX_ITERATIONS, seed)?;
        for r in found.iter_mut() {
            *r = polish(core, *r);
            let (p, _, bound) = eval_with_bound(core, *r);
            let rel = if bound.is_zero() { 0.0 } else { p.abs().div_to_c64(&bound).re };
            if rel > RESIDUAL_TOL {
                return Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: rel });
            }
        }
        roots.extend(found);
    }
    Ok(roots)
}

/// Newton steps that are kept only while they reduce the residual.
fn polish(coeffs: &[ExtC], mut r: C64) -> C64 {
    let (mut p, mut dp, _) = eval_with_bound(coeffs, r);
    for _ in 0..3 {
        if p.is_zero() || dp.is_zero() {
            break;
        }
        let cand = r - p.div_to_c64(&dp);
        let (pc, dpc, _) = eval_with_bound(coeffs, cand);
        if pc.log2_abs() < p.log2_abs() {
            r = cand;
            p = pc;
            dp = dpc;
        } else {
            break;
        }
    }
    r
}

/// All complex roots of a float polynomial, with multiplicity.
pub fn complex_roots(p: &Poly<C64>) -> Result<Vec<C64>> {
    complex_roots_seeded(p, DEFAULT_SEED)
}

/// [`complex_roots`] with an explicit seed for the starting configuration.
pub fn complex_roots_seeded(p: &Poly<C64>, seed: u64) -> Result<Vec<C64>> {
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    let ext: Vec<ExtC> = p.coeffs().iter().map(|&c| ExtC::from_c64(c)).collect();
    ext_roots(&ext, seed)
}

/// Monic greatest common divisor of two exact polynomials.
pub fn rational_gcd(a: &Poly<Rational>, b: &Poly<Rational>) -> Result<Poly<Rational>> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(&b)?;
        a = b;
        b = r;
    }
    if a.is_zero() {
        Ok(a)
    } else {
        a.monic()
    }
}

/// Square-free factorization `p = c·∏ s_k^k` (Yun's algorithm), returned as
/// the non-constant factors `(s_k, k)`.
pub fn squarefree_factors(p: &Poly<Rational>) -> Result<Vec<(Poly<Rational>, usize)>> {
    if p.deg() == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let a0 = rational_gcd(p, &dp)?;
    let mut b = p.exact_quotient(&a0)?;
    let mut c = dp.exact_quotient(&a0)?;
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut k = 1;
    while b.deg() > 0 {
        let a = rational_gcd(&b, &d)?;
        if a.deg() > 0 {
            out.push((a.clone(), k));
        }
        b = b.exact_quotient(&a)?;
        c = d.exact_quotient(&a)?;
        d = c.sub(&b.derivative());
        k += 1;
    }
    Ok(out)
}

/// All complex roots of an exact polynomial, with multiplicity.
///
/// Repeated roots are separated exactly by a square-free factorization before
/// any floating-point work, so they come out as accurately as simple roots.
pub fn rational_roots(p: &Poly<Rational>) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(p.deg());
    for (factor, k) in squarefree_factors(p)? {
        let ext: Vec<ExtC> = factor.coeffs().iter().map(ExtC::from_rational).collect();
        let roots = ext_roots(&ext, DEFAULT_SEED)?;
        for _ in 0..k {
            out.extend_from_slice(&roots);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::matching::multiset_match;
    use proptest::prelude::*;

    fn cp(v: &[f64]) -> Poly<C64> {
        Poly::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[test]
    fn repeated_rational_roots_are_accurate() {
        let r = |n: i64| crate::poly_core::field::rat(n, 1);
        // (x − 3)^4 (x + 1)^2 x
        let lin = |a: i64| Poly::new(vec![r(-a), r(1)]);
        let p = lin(3).pow(4).mul(&lin(-1).pow(2)).mul(&lin(0));
        let f = squarefree_factors(&p).unwrap();
        assert_eq!(f.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 2, 4]);
        let roots = rational_roots(&p).unwrap();
        let want = [3.0, 3.0, 3.0, 3.0, -1.0, -1.0, 0.0].map(|x| Complex64::new(x, 0.0));
        assert!(multiset_match(&roots, &want, 1e-14).unwrap().matched);
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let i = Complex64::new(0.0, 1.0);
        let r = complex_roots(&cp(&[1.0, 0.0, 1.0])).unwrap();
        assert!(multiset_match(&r, &[i, -i], 1e-12).unwrap().matched);
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let r = complex_roots(&cp(&[-1.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(multiset_match(&r, &[Complex64::new(1.0, 0.0), w, w.conj()], 1e-12).unwrap().matched);
        let s5 = 5f64.sqrt();
        let r = complex_roots(&cp(&[-1.0, -1.0, 1.0])).unwrap();
        let golden = [Complex64::new((1.0 + s5) / 2.0, 0.0), Complex64::new((1.0 - s5) / 2.0, 0.0)];
        assert!(multiset_match(&r, &golden, 1e-12).unwrap().matched);
    }

    #[test]
    fn zero_roots_are_exact() {
        let r = complex_roots(&cp(&[0.0, 0.0, -2.0, 1.0])).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn huge_coefficients_do_not_overflow() {
        use num_bigint::BigInt;
        // (z − 2^700)(z − 2^-700) with exact rational coefficients.
        let big = Rational::from_integer(BigInt::from(1) << 700usize);
        let small = big.recip();
        let p = Poly::new(vec![Rational::from_integer(1.into()), -(&big + &small), Rational::from_integer(1.into())]);
        let r = rational_roots(&p).unwrap();
        let mut logs: Vec<f64> = r.iter().map(|z| z.norm().log2()).collect();
        logs.sort_by(f64::total_cmp);
        assert!((logs[0] + 700.0).abs() < 1e-9 && (logs[1] - 700.0).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn vieta_sum_and_product(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=12), lead in 0.5f64..2.0) {
            let mut c: Vec<C64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            c.push(Complex64::new(lead, 0.0));
            let d = c.len() - 1;
            let p = Poly::new(c.clone());
            let roots = complex_roots(&p).unwrap();
            prop_assert_eq!(roots.len(), d);
            let sum: C64 = roots.iter().sum();
            let expect_sum = -c[d - 1] / c[d];
            prop_assert!((sum - expect_sum).norm() <= 1e-8 * expect_sum.norm().max(1.0));
            let prod: C64 = roots.iter().product();
            let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
            let expect_prod = c[0] / c[d] * sign;
            prop_assert!((prod - expect_prod).norm() <= 1e-8 * expect_prod.norm().max(1.0));
        }
    }
}
