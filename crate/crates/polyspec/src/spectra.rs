//! Dynatomic polynomials, multiplier polynomials and multiplier spectra.
//!
//! For a polynomial `f` of degree `d ≥ 2` and a period `p ≥ 1`:
//!
//! * the dynatomic polynomial `Φ^(p)` is the Möbius quotient of the iterates
//!   `f^{∘k}(z) − z` over the divisors `k` of `p`;
//! * the multiplier polynomial `χ^(p)` is the monic polynomial with
//!   `(χ^(p))^p = ∏_{Φ^(p)(r)=0} (λ − (f^{∘p})′(r))`, whose roots form the
//!   period-`p` multiplier multiset;
//! * `σ^(p)_j` are the signed coefficients of `χ^(p)` (elementary symmetric
//!   functions of the multipliers).
//!
//! Exact rational inputs use a multi-modular engine. Complex float inputs use
//! a Hessenberg characteristic polynomial, or an independent route that finds
//! the periodic points, groups them into cycles and multiplies derivatives.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly_core::accurate::{DdC, DdPoly, DD_EPS};
use crate::poly_core::ext::ExtC;
use crate::poly_core::field::{cdiv, Field, Rational, Ring, C64};
use crate::poly_core::linalg::{det_bareiss, norm_polynomial, sylvester};
use crate::poly_core::modular::{divisors, multiplier_poly_modular};
use crate::poly_core::poly::Poly;
use crate::poly_core::roots::{aberth_sweeps, circle_start, complex_roots, rational_roots, RootOracle, NewtonStep, DEFAULT_SEED, MAX_ITERATIONS};

/// Relative tolerance of the float `p`-th root extraction.
pub const FLOAT_ROOT_TOL: f64 = 1e-6;
/// Periodic points closer than this (relative to `max(1, max|r|)`) make cycle
/// grouping ambiguous.
pub const NEAR_PARABOLIC_GAP: f64 = 1e-6;

/// Cycle counts `ν`, `N` and `m` for degree `d` and period `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleCounts {
    /// Degree.
    pub d: u64,
    /// Period.
    pub p: u64,
    /// Number of points of formal period `p`: `Σ_{k|p} μ(p/k) d^k`.
    pub nu: u64,
    /// Number of cycles: `ν/p`.
    pub n: u64,
    /// Exponent of `a_d` normalizing the resultant.
    pub m: u64,
}

/// Möbius function.
pub fn mobius(mut n: u64) -> i64 {
    let mut sign = 1i64;
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            n /= k;
            if n.is_multiple_of(k) {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

/// The counts `ν_d^(p)`, `N_d^(p)` and `m_d^(p)`.
pub fn cycle_counts(d: u64, p: u64) -> Result<CycleCounts> {
    if d < 2 || p < 1 {
        return Err(Error::InvalidInput(format!("cycle counts need d ≥ 2 and p ≥ 1 (got d={d}, p={p})")));
    }
    let overflow = || Error::DegreeOverflow(format!("counts for d={d}, p={p} exceed 64 bits"));
    let pow = |k: u64| -> Result<i128> { Ok(d.checked_pow(k as u32).ok_or_else(overflow)? as i128) };
    let mut nu: i128 = 0;
    for k in divisors(p as usize) {
        nu += mobius(p / k as u64) as i128 * pow(k as u64)?;
    }
    if nu <= 0 || nu % p as i128 != 0 {
        return Err(Error::CheckFailed(format!("ν = {nu} is not a positive multiple of p = {p}")));
    }
    let nu = nu as u64;
    let m = if p == 1 {
        d - 1
    } else {
        let geo = (pow(p)? as u64 - 1) / (d - 1);
        nu.checked_mul(geo).ok_or_else(overflow)?
    };
    Ok(CycleCounts { d, p, nu, n: nu / p, m })
}

fn degree_of<R: Ring>(f: &Poly<R>) -> Result<usize> {
    match f.degree() {
        Some(d) if d >= 2 => Ok(d),
        _ => Err(Error::InvalidInput("dynamical operations need deg f ≥ 2".into())),
    }
}

/// Dynatomic polynomials `Φ^(k)` for every divisor `k` of `p`, in increasing
/// order of `k`.
pub fn dynatomic_factors<F: Field>(f: &Poly<F>, p: usize) -> Result<Vec<(usize, Poly<F>)>> {
    degree_of(f)?;
    if p == 0 {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    let mut out: Vec<(usize, Poly<F>)> = Vec::new();
    let mut iterate = Poly::identity();
    let mut level = 0usize;
    for k in divisors(p) {
        while level < k {
            iterate = f.compose(&iterate);
            level += 1;
        }
        let mut num = iterate.sub(&Poly::identity());
        for (j, phi) in &out {
            if k % j == 0 {
                num = num.exact_quotient(phi)?;
            }
        }
        out.push((k, num));
    }
    Ok(out)
}

/// The dynatomic polynomial `Φ_f^(p)`.
pub fn dynatomic<F: Field>(f: &Poly<F>, p: usize) -> Result<Poly<F>> {
    Ok(dynatomic_factors(f, p)?.pop().expect("p divides p").1)
}

/// `χ^(p)` by the characteristic polynomial of multiplication by
/// `(f^{∘p})′` modulo `Φ^(p)`, followed by a `p`-th root.
///
/// Works over any field backend; `root_tol` is the relative residual allowed
/// in the `p`-th root on inexact backends.
pub fn multiplier_poly_generic<F: Field>(f: &Poly<F>, p: usize, root_tol: f64) -> Result<Poly<F>> {
    let phi = dynatomic(f, p)?;
    let h = f.iterate(p as u32)?.derivative();
    let cp = norm_polynomial(&phi, &h)?;
    let cp = if F::EXACT { cp } else { cp.monic()? };
    cp.pth_root(p, root_tol)
}

/// `χ^(p)` from the Sylvester resultant `a_d^{−m} res_z(Φ^(p), λ − (f^{∘p})′)`.
///
/// The determinant is taken over `F[λ]` by fraction-free elimination; this is
/// the literal definition and is meant for cross-checks at small sizes.
pub fn multiplier_poly_resultant<F: Field>(f: &Poly<F>, p: usize, root_tol: f64) -> Result<Poly<F>> {
    let d = degree_of(f)? as u64;
    let counts = cycle_counts(d, p as u64)?;
    let phi = dynatomic(f, p)?;
    let h = f.iterate(p as u32)?.derivative();
    let pz: Vec<Poly<F>> = phi.coeffs().iter().map(|c| Poly::constant(c.clone())).collect();
    let mut qz: Vec<Poly<F>> = h.coeffs().iter().map(|c| Poly::constant(c.neg())).collect();
    qz[0] = qz[0].add(&Poly::identity());
    let res = det_bareiss(sylvester(&pz, &qz))?;
    let ad = f.lc().expect("nonzero").clone();
    let scaled = res.scale(&ad.powu(counts.m).inv()?);
    let scaled = if F::EXACT {
        if !scaled.lc().is_some_and(|c| c.sub(&F::one()).is_zero()) {
            return Err(Error::CheckFailed("normalized resultant is not monic".into()));
        }
        scaled
    } else {
        scaled.monic()?
    };
    scaled.pth_root(p, root_tol)
}

/// Exact `χ_f^(p)` of a rational polynomial.
pub fn multiplier_poly_exact(f: &Poly<Rational>, p: usize) -> Result<Poly<Rational>> {
    degree_of(f)?;
    multiplier_poly_modular(f, p)
}

/// `χ_f^(p)` of a complex float polynomial (charpoly route, normalized monic).
pub fn multiplier_poly_float(f: &Poly<C64>, p: usize) -> Result<Poly<C64>> {
    multiplier_poly_generic(f, p, FLOAT_ROOT_TOL)
}

/// `χ_f^(p)` of a float polynomial from its periodic points grouped into
/// cycles; errors if two periodic points are too close to group reliably.
pub fn multiplier_poly_cycles(f: &Poly<C64>, p: usize) -> Result<Poly<C64>> {
    let values = cycle_multipliers(f, p, true)?;
    Ok(values.iter().fold(Poly::one(), |acc, &l| acc.mul(&Poly::new(vec![-l, Complex64::new(1.0, 0.0)]))))
}

/// Signed coefficients `σ_j = (−1)^j c_{N−j}` of a monic `χ`, for `j = 1..N`.
pub fn sigma_from_chi<F: Field>(chi: &Poly<F>) -> Vec<F> {
    let n = chi.deg();
    (1..=n)
        .map(|j| {
            let c = chi.coeff(n - j);
            if j % 2 == 1 {
                c.neg()
            } else {
                c
            }
        })
        .collect()
}

/// The σ-vectors of `χ^(1), …, χ^(P)` for an exact polynomial.
pub fn mult_morphism(f: &Poly<Rational>, periods: usize) -> Result<Vec<Vec<Rational>>> {
    (1..=periods).map(|p| Ok(sigma_from_chi(&multiplier_poly_exact(f, p)?))).collect()
}

/// The σ-vectors of `χ^(1), …, χ^(P)` for a float polynomial.
pub fn mult_morphism_float(f: &Poly<C64>, periods: usize) -> Result<Vec<Vec<C64>>> {
    (1..=periods).map(|p| Ok(sigma_from_chi(&multiplier_poly_float(f, p)?))).collect()
}

/// `d + Σ_{j=1}^{d} (−1)^j (d − j) σ_j` from the fixed-point σ-vector.
pub fn fixed_point_relation<F: Field>(sigma1: &[F]) -> F {
    let d = sigma1.len() as i64;
    sigma1.iter().enumerate().fold(F::from_i64(d), |acc, (idx, s)| {
        let j = idx as i64 + 1;
        let term = s.mul(&F::from_i64(d - j));
        if j % 2 == 1 {
            acc.sub(&term)
        } else {
            acc.add(&term)
        }
    })
}

/// Residual of the holomorphic fixed-point relation (exactly zero).
pub fn fixed_point_relation_residual(f: &Poly<Rational>) -> Result<Rational> {
    Ok(fixed_point_relation(&sigma_from_chi(&multiplier_poly_exact(f, 1)?)))
}

/// `Σ 1/(1 − λ)` over the fixed-point multipliers of a float polynomial,
/// together with the smallest `|λ − 1|`.
pub fn fixed_point_index_sum(f: &Poly<C64>) -> Result<(C64, f64)> {
    degree_of(f)?;
    let fixed = complex_roots(&f.sub(&Poly::identity()))?;
    let df = f.derivative();
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut gap = f64::INFINITY;
    for w in fixed {
        let l = df.eval(&w);
        gap = gap.min((l - one).norm());
        sum += cdiv(one, one - l);
    }
    Ok((sum, gap))
}

/// Multiplier multiset of one period.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierSpectrum {
    /// Degree of the map.
    pub d: usize,
    /// Period.
    pub p: usize,
    /// Multipliers with multiplicity (`N_d^(p)` entries).
    pub values: Vec<C64>,
}

/// Spectrum of an exact polynomial: numeric roots of the exact `χ^(p)`.
pub fn spectrum_exact(f: &Poly<Rational>, p: usize) -> Result<MultiplierSpectrum> {
    let d = degree_of(f)?;
    let chi = multiplier_poly_exact(f, p)?;
    let values = if chi.deg() == 0 { Vec::new() } else { rational_roots(&chi)? };
    Ok(MultiplierSpectrum { d, p, values })
}

/// Spectrum of a float polynomial from its periodic points.
///
/// Parabolic cycles of shorter period whose multiplier is a root of unity of
/// the right order appear exactly as they do among the roots of `χ^(p)`.
pub fn spectrum_float(f: &Poly<C64>, p: usize) -> Result<MultiplierSpectrum> {
    let d = degree_of(f)?;
    Ok(MultiplierSpectrum { d, p, values: cycle_multipliers(f, p, false)? })
}

/// Newton oracle for `Φ^(p)` evaluated through iterates of `f` in
/// double-double arithmetic.
struct DynatomicOracle<'a> {
    f: &'a DdPoly,
    /// Coefficients of `f` and `f′` with extended exponents, for orbits that
    /// overflow double range.
    ext: (Vec<ExtC>, Vec<ExtC>),
    p: usize,
    nu: usize,
    weights: Vec<(usize, i64)>,
}

/// One evaluation of the dynatomic oracle.
struct DynatomicEval {
    /// `f^{∘p}(z) − z`.
    g: C64,
    /// `Φ′/Φ` at `z`.
    logd: C64,
    /// Noise level of `g` (evaluation error plus representation of `z`).
    noise: f64,
}

impl DynatomicOracle<'_> {
    fn eval(&self, zd: DdC) -> Option<DynatomicEval> {
        let mut s = zd;
        let mut deriv = Complex64::new(1.0, 0.0);
        let mut bound = 0.0f64;
        let mut orbit: Vec<(C64, C64)> = Vec::with_capacity(self.p);
        let one = Complex64::new(1.0, 0.0);
        for _ in 0..self.p {
            let fp = self.f.eval_deriv(s).to_c64();
            let r = s.norm();
            bound = fp.norm() * bound + 8.0 * DD_EPS * (self.f.degree() as f64 + 1.0) * self.f.abs_bound(r);
            deriv *= fp;
            s = self.f.eval(s);
            orbit.push((s.sub(zd).to_c64(), deriv));
        }
        let mut logd = Complex64::new(0.0, 0.0);
        for &(k, mu) in &self.weights {
            let (g, dk) = orbit[k - 1];
            logd += cdiv(dk - one, g) * mu as f64;
        }
        let finite = |c: C64| c.re.is_finite() && c.im.is_finite();
        let (g, dp) = orbit[self.p - 1];
        let noise = 4.0 * (bound + (dp - one).norm() * DD_EPS * zd.norm());
        if g == Complex64::new(0.0, 0.0) && noise.is_finite() {
            // An exact root; Φ′/Φ is infinite and never used.
            return Some(DynatomicEval { g, logd: Complex64::new(f64::INFINITY, 0.0), noise });
        }
        if !finite(logd) || !finite(g) || !bound.is_finite() {
            return None;
        }
        Some(DynatomicEval { g, logd, noise })
    }

    /// `Φ′/Φ` for points whose orbit overflows double range; only the Newton
    /// direction matters there. The orbit is followed in double-double while
    /// it stays finite and in extended exponents afterwards.
    fn far_logd(&self, zd: DdC) -> Option<C64> {
        let horner = |c: &[ExtC], w: &ExtC| c.iter().rev().fold(ExtC::ZERO, |acc, a| acc.mul(w).add(a));
        let one = ExtC::from_c64(Complex64::new(1.0, 0.0));
        let z0 = ExtC::from_c64(zd.to_c64());
        let mut exact = Some(zd);
        let mut s = z0;
        let mut deriv = one;
        let mut logd = Complex64::new(0.0, 0.0);
        for k in 1..=self.p {
            let mut g = None;
            if let Some(sd) = exact {
                let fp = self.f.eval_deriv(sd).to_c64();
                let next = self.f.eval(sd);
                let gd = next.sub(zd).to_c64();
                if fp.re.is_finite() && fp.im.is_finite() && gd.re.is_finite() && gd.im.is_finite() {
                    deriv = deriv.mul(&ExtC::from_c64(fp));
                    s = ExtC::from_c64(next.to_c64());
                    exact = Some(next);
                    g = Some(ExtC::from_c64(gd));
                } else {
                    exact = None;
                }
            }
            if exact.is_none() {
                deriv = deriv.mul(&horner(&self.ext.1, &s));
                s = horner(&self.ext.0, &s);
            }
            if let Some(&(_, mu)) = self.weights.iter().find(|(j, _)| *j == k) {
                let g = g.unwrap_or_else(|| s.add(&z0.neg()));
                if g.is_zero() {
                    return None;
                }
                logd += deriv.add(&one.neg()).div_to_c64(&g) * mu as f64;
            }
        }
        (logd.re.is_finite() && logd.im.is_finite() && logd != Complex64::new(0.0, 0.0)).then_some(logd)
    }

    /// Aberth iteration with double-double positions, started from an f64
    /// configuration.
    ///
    /// Distinct periodic points can be closer than f64 resolution when the
    /// multipliers are large; f64 approximations then coincide or pair up on
    /// one root. Here the mutual repulsion acts on double-double differences,
    /// so such clusters separate. Exactly coincident starts are first moved
    /// apart by a few ulps.
    fn refine(&self, start: &[C64]) -> Result<Vec<DdC>> {
        let n = start.len();
        let scale = start.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
        let mut z: Vec<DdC> = Vec::with_capacity(n);
        for (i, &s) in start.iter().enumerate() {
            let mut w = DdC::from_c64(s);
            if z.iter().any(|&u: &DdC| u.sub(w).norm() == 0.0) {
                let size = SEPARATION_ULPS * f64::EPSILON * s.norm().max(f64::EPSILON * scale);
                let theta = std::f64::consts::TAU * (i as f64 * 0.618_033_988_749_895).fract();
                w = w.add(DdC::from_c64(Complex64::from_polar(size, theta)));
            }
            z.push(w);
        }
        let one = Complex64::new(1.0, 0.0);
        let mut done = vec![false; n];
        for sweep in 0..DD_SWEEPS {
            let evals: Vec<Option<Option<DynatomicEval>>> = z
                .par_iter()
                .zip(done.par_iter())
                .map(|(&zi, &d)| (!d).then(|| self.eval(zi)))
                .collect();
            let snapshot = z.clone();
            let mut pending = false;
            for i in 0..n {
                let Some(ev) = &evals[i] else { continue };
                let w = match ev {
                    Some(ev) if ev.g.norm() <= ev.noise => {
                        done[i] = true;
                        continue;
                    }
                    Some(ev) => cdiv(one, ev.logd),
                    None => match self.far_logd(snapshot[i]) {
                        Some(logd) => cdiv(one, logd),
                        None if snapshot[i].norm() <= 2.0 * scale => {
                            // On a point of lower period Φ′/Φ is undefined: nudge.
                            let size = NUDGE * snapshot[i].norm().max(f64::EPSILON * scale);
                            let theta = std::f64::consts::TAU * ((i + sweep) as f64 * 0.618_033_988_749_895).fract();
                            z[i] = snapshot[i].add(DdC::from_c64(Complex64::from_polar(size, theta)));
                            pending = true;
                            continue;
                        }
                        None => snapshot[i].to_c64() / n as f64,
                    },
                };
                let mut repulsion = Complex64::new(0.0, 0.0);
                for (j, zj) in snapshot.iter().enumerate() {
                    if j != i {
                        repulsion += cdiv(one, snapshot[i].sub(*zj).to_c64());
                    }
                }
                let corr = cdiv(w, one - w * repulsion);
                if !(corr.re.is_finite() && corr.im.is_finite()) {
                    pending = true;
                    continue;
                }
                if corr.norm() <= DD_RESOLUTION * scale {
                    done[i] = true;
                    continue;
                }
                pending = true;
                z[i] = snapshot[i].sub(DdC::from_c64(corr));
            }
            if !pending {
                break;
            }
        }
        // Points the double-double sweeps could not certify must still meet
        // the f64 residual standard.
        let mut worst = 0.0f64;
        for (zi, &d) in z.iter().zip(&done) {
            if d {
                continue;
            }
            match self.eval(*zi) {
                Some(ev) if ev.g.norm() <= ev.noise * (f64::EPSILON / DD_EPS) => {}
                Some(ev) => worst = worst.max(ev.g.norm() / ev.noise),
                None => worst = f64::INFINITY,
            }
        }
        if worst > 0.0 {
            return Err(Error::NoConvergence { iterations: DD_SWEEPS, residual: worst });
        }
        Ok(z)
    }
}

impl RootOracle for DynatomicOracle<'_> {
    fn degree(&self) -> usize {
        self.nu
    }

    fn newton(&self, z: C64) -> NewtonStep {
        let Some(ev) = self.eval(DdC::from_c64(z)) else {
            let step = match self.far_logd(DdC::from_c64(z)) {
                Some(logd) => cdiv(Complex64::new(1.0, 0.0), logd),
                // Far outside the filled Julia set Φ′/Φ ≈ ν/z.
                None => z / self.nu as f64,
            };
            return NewtonStep { step, converged: false, residual: f64::INFINITY };
        };
        let noise = ev.noise + 4.0 * f64::EPSILON * z.norm() * (ev.g.norm() / z.norm().max(f64::MIN_POSITIVE));
        let step = cdiv(Complex64::new(1.0, 0.0), ev.logd);
        let converged = ev.g.norm() <= noise.max(ev.noise) || step.norm() <= 2.0 * f64::EPSILON * z.norm() || ev.g.norm() == 0.0;
        NewtonStep { step, converged, residual: if noise > 0.0 { ev.g.norm() / noise } else { f64::INFINITY } }
    }
}

/// Maximum double-double Aberth sweeps after the f64 iteration.
const DD_SWEEPS: usize = 3000;
/// Corrections below this fraction of the root scale end the double-double sweeps.
const DD_RESOLUTION: f64 = 1e-29;
/// Relative size of the double-double nudge off a point of lower period.
const NUDGE: f64 = 1e-24;
/// Size, in ulps, of the offset that separates coincident f64 approximations.
const SEPARATION_ULPS: f64 = 16.0;

/// Points of formal period `p` (roots of `Φ^(p)` with multiplicity).
pub fn periodic_points(f: &Poly<C64>, p: usize) -> Result<Vec<C64>> {
    let fd = DdPoly::from_c64(f.coeffs());
    Ok(periodic_points_dd(f, &fd, p)?.into_iter().map(DdC::to_c64).collect())
}

fn periodic_points_dd(f: &Poly<C64>, fd: &DdPoly, p: usize) -> Result<Vec<DdC>> {
    let d = degree_of(f)?;
    let counts = cycle_counts(d as u64, p as u64)?;
    let weights: Vec<(usize, i64)> = divisors(p)
        .into_iter()
        .map(|k| (k, mobius((p / k) as u64)))
        .filter(|&(_, mu)| mu != 0)
        .collect();
    let ext = (
        f.coeffs().iter().map(|&c| ExtC::from_c64(c)).collect(),
        f.derivative().coeffs().iter().map(|&c| ExtC::from_c64(c)).collect(),
    );
    let oracle = DynatomicOracle { f: fd, ext, p, nu: counts.nu as usize, weights };
    let fixed = complex_roots(&f.sub(&Poly::identity()))?;
    let pts = if p == 1 {
        fixed
    } else {
        let crit = complex_roots(&f.derivative()).unwrap_or_default();
        let center = -f.coeff(d - 1) / (f.coeff(d) * d as f64);
        let radius = fixed
            .iter()
            .chain(crit.iter())
            .map(|w| (w - center).norm())
            .fold(0.0f64, f64::max);
        let radius = (1.1 * radius).max(1e-3 * center.norm().max(1.0));
        let start = circle_start(oracle.nu, center, radius, DEFAULT_SEED.wrapping_add(p as u64));
        // Unconverged f64 approximations are handed to the double-double
        // stage, which decides convergence.
        aberth_sweeps(&oracle, start, MAX_ITERATIONS, DEFAULT_SEED)?.0
    };
    oracle.refine(&pts)
}

/// Multipliers of the period-`p` cycles of a float polynomial.
///
/// Periodic points are refined and kept in double-double precision. They are
/// grouped into cycles by mapping each point forward and snapping to the
/// nearest periodic point. With `strict`, a grouping that is not a union of
/// `p`-cycles, or periodic points closer than [`NEAR_PARABOLIC_GAP`], is an
/// error. Otherwise the multiplier of every point is computed along its
/// snapped orbit and the values are grouped `p` at a time.
pub fn cycle_multipliers(f: &Poly<C64>, p: usize, strict: bool) -> Result<Vec<C64>> {
    let fd = DdPoly::from_c64(f.coeffs());
    let pts = periodic_points_dd(f, &fd, p)?;
    let n = pts.len();
    let scale = pts.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let df = |z: DdC| fd.eval_deriv(z).to_c64();
    if p == 1 {
        return Ok(pts.iter().map(|&z| df(z)).collect());
    }
    let dist = |a: DdC, b: DdC| a.sub(b).norm();
    if strict {
        for i in 0..n {
            for j in i + 1..n {
                if dist(pts[i], pts[j]) < NEAR_PARABOLIC_GAP * scale {
                    return Err(Error::AmbiguousCycles(format!(
                        "periodic points {} and {} are closer than {NEAR_PARABOLIC_GAP}",
                        pts[i].to_c64(),
                        pts[j].to_c64()
                    )));
                }
            }
        }
    }
    let next: Vec<usize> = pts
        .iter()
        .map(|&z| {
            let w = fd.eval(z);
            (0..n)
                .min_by(|&a, &b| dist(pts[a], w).total_cmp(&dist(pts[b], w)))
                .expect("nonempty")
        })
        .collect();
    if let Some(cycles) = cycles_of(&next, p) {
        return Ok(cycles
            .iter()
            .map(|cyc| cyc.iter().map(|&i| df(pts[i])).product())
            .collect());
    }
    if strict {
        return Err(Error::AmbiguousCycles("nearest-neighbour map is not a union of p-cycles".into()));
    }
    let per_point: Vec<C64> = (0..n)
        .map(|i| {
            let mut j = i;
            let mut l = Complex64::new(1.0, 0.0);
            for _ in 0..p {
                l *= df(pts[j]);
                j = next[j];
            }
            l
        })
        .collect();
    Ok(group_values(&per_point, p))
}

/// Decompose `next` into cycles of length exactly `p`, if it is such a
/// permutation.
fn cycles_of(next: &[usize], p: usize) -> Option<Vec<Vec<usize>>> {
    let n = next.len();
    let mut seen = vec![false; n];
    let mut hits = vec![0usize; n];
    for &j in next {
        hits[j] += 1;
    }
    if hits.iter().any(|&h| h != 1) {
        return None;
    }
    let mut out = Vec::with_capacity(n / p);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut j = next[start];
        while j != start {
            if seen[j] || cyc.len() >= p {
                return None;
            }
            seen[j] = true;
            cyc.push(j);
            j = next[j];
        }
        if cyc.len() != p {
            return None;
        }
        out.push(cyc);
    }
    Some(out)
}

/// Group `p·N` values into `N` clusters of `p` nearby values and average them.
fn group_values(values: &[C64], p: usize) -> Vec<C64> {
    let mut free: Vec<usize> = (0..values.len()).collect();
    let mut out = Vec::with_capacity(values.len() / p);
    while !free.is_empty() {
        let i = free.remove(0);
        let mut near: Vec<(usize, f64)> = free
            .iter()
            .enumerate()
            .map(|(pos, &j)| (pos, (values[j] - values[i]).norm()))
            .collect();
        near.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut take: Vec<usize> = near.iter().take(p - 1).map(|&(pos, _)| pos).collect();
        let mut sum = values[i];
        for &pos in &take {
            sum += values[free[pos]];
        }
        take.sort_unstable_by(|a, b| b.cmp(a));
        for pos in take {
            free.remove(pos);
        }
        out.push(sum / p as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::rat;
    use crate::poly_core::matching::multiset_match;
    use proptest::prelude::*;

    fn q(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&x| Rational::from_i64(x)).collect())
    }

    fn c(v: &[(f64, f64)]) -> Poly<C64> {
        Poly::new(v.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
    }

    #[test]
    fn counts() {
        let c42 = cycle_counts(4, 2).unwrap();
        assert_eq!((c42.nu, c42.n), (12, 6));
        let c21 = cycle_counts(2, 1).unwrap();
        assert_eq!((c21.nu, c21.n, c21.m), (2, 2, 1));
        let c32 = cycle_counts(3, 2).unwrap();
        assert_eq!((c32.nu, c32.n, c32.m), (6, 3, 24));
        assert!(cycle_counts(1, 2).is_err());
        assert_eq!((mobius(1), mobius(2), mobius(4), mobius(6)), (1, -1, 0, 1));
    }

    #[test]
    fn dynatomic_examples() {
        let z2 = q(&[0, 0, 1]);
        assert_eq!(dynatomic(&z2, 1).unwrap(), q(&[0, -1, 1]));
        assert_eq!(dynatomic(&z2, 2).unwrap(), q(&[1, 1, 1]));
        let f = Poly::new(vec![rat(1, 3), rat(-2, 5), rat(0, 1), rat(7, 2)]);
        for p in 1..=3 {
            let nu = cycle_counts(3, p).unwrap().nu as usize;
            assert_eq!(dynatomic(&f, p as usize).unwrap().deg(), nu);
        }
    }

    #[test]
    fn multiplier_poly_examples() {
        let z2 = q(&[0, 0, 1]);
        assert_eq!(multiplier_poly_exact(&z2, 1).unwrap(), q(&[0, -2, 1]));
        assert_eq!(multiplier_poly_exact(&z2, 2).unwrap(), q(&[-4, 1]));
        let cc = rat(5, 7);
        let f = Poly::new(vec![cc.clone(), rat(0, 1), rat(1, 1)]);
        let expect = Poly::new(vec![-(cc * rat(4, 1) + rat(4, 1)), rat(1, 1)]);
        assert_eq!(multiplier_poly_exact(&f, 2).unwrap(), expect);
    }

    fn parse_all(v: &[&str]) -> Poly<Rational> {
        Poly::new(v.iter().map(|s| crate::poly_core::field::parse_rational(s).unwrap()).collect())
    }

    #[test]
    fn frozen_oracle_quartic() {
        // f = z^4 + (3/7) z^2 − (1/5) z + 2/3, values from an independent
        // symbolic resultant computation.
        let f = Poly::new(vec![rat(2, 3), rat(-1, 5), rat(3, 7), rat(0, 1), rat(1, 1)]);
        let chi1 = parse_all(&["4085367791/40516875", "-652788/8575", "484174/8575", "-68/5", "1"]);
        let chi2 = parse_all(&[
            "17485354597463157673779192752537/465592380820552001953125",
            "-869689886670266090370138418/98538070014931640625",
            "11679191699316347525513/11491320118359375",
            "-24836190785477404/347432203125",
            "128111120689/40516875",
            "-731134/8575",
            "1",
        ]);
        assert_eq!(multiplier_poly_exact(&f, 1).unwrap(), chi1);
        assert_eq!(multiplier_poly_exact(&f, 2).unwrap(), chi2);
    }

    #[test]
    fn three_routes_agree_exactly() {
        let f = Poly::new(vec![rat(-1, 2), rat(1, 3), rat(2, 1), rat(1, 1)]);
        for p in 1..=2 {
            let a = multiplier_poly_exact(&f, p).unwrap();
            let b = multiplier_poly_generic(&f, p, 0.0).unwrap();
            let c = multiplier_poly_resultant(&f, p, 0.0).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn power_map_spectra() {
        for d in 2..=5i64 {
            let mut v = vec![0i64; d as usize + 1];
            v[d as usize] = 1;
            let s1 = spectrum_exact(&q(&v), 1).unwrap();
            let mut expect = vec![Complex64::new(d as f64, 0.0); d as usize - 1];
            expect.push(Complex64::new(0.0, 0.0));
            assert!(multiset_match(&s1.values, &expect, 1e-9).unwrap().matched);
            let s2 = spectrum_exact(&q(&v), 2).unwrap();
            let n2 = (d * (d - 1) / 2) as usize;
            assert!(multiset_match(&s2.values, &vec![Complex64::new((d * d) as f64, 0.0); n2], 1e-9).unwrap().matched);
        }
    }

    #[test]
    fn parabolic_double_fixed_point() {
        let s = spectrum_exact(&q(&[0, 1, 1]), 1).unwrap();
        assert_eq!(s.values.len(), 2);
        for l in &s.values {
            assert!((l - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
        let s = spectrum_float(&c(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)]), 1).unwrap();
        for l in &s.values {
            assert!((l - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn fixed_point_relation_examples() {
        assert_eq!(fixed_point_relation_residual(&q(&[0, 0, 1])).unwrap(), rat(0, 1));
        let f = Poly::new(vec![rat(-3, 11), rat(0, 1), rat(1, 1)]);
        assert_eq!(fixed_point_relation_residual(&f).unwrap(), rat(0, 1));
        let g = c(&[(0.3, -0.2), (1.5, 0.1), (0.0, 0.7), (1.0, 0.0)]);
        let (sum, gap) = fixed_point_index_sum(&g).unwrap();
        assert!(gap > 1e-3 && sum.norm() < 1e-8);
    }

    #[test]
    fn float_routes_agree() {
        let f = c(&[(0.31, -0.2), (0.1, 0.4), (-0.7, 0.05), (1.0, 0.0)]);
        for p in 1..=3 {
            let a = multiplier_poly_float(&f, p).unwrap();
            let b = multiplier_poly_cycles(&f, p).unwrap();
            let scale = a.coeff_scale();
            for k in 0..=a.deg() {
                assert!((a.coeff(k) - b.coeff(k)).norm() <= 1e-6 * scale, "p={p} k={k}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conjugation_invariance(a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=4),
                                  alpha in (0.5f64..2.0, -1.0f64..1.0), beta in (-1.0f64..1.0, -1.0f64..1.0)) {
            let mut co: Vec<C64> = a.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            co.push(Complex64::new(1.0, 0.0));
            let f = Poly::new(co);
            let g = crate::moduli::conjugate(&f, Complex64::new(alpha.0, alpha.1), Complex64::new(beta.0, beta.1)).unwrap();
            for p in 1..=2 {
                let sf = spectrum_float(&f, p).unwrap();
                let sg = spectrum_float(&g, p).unwrap();
                prop_assert!(multiset_match(&sf.values, &sg.values, 1e-7).unwrap().matched);
            }
        }

        #[test]
        fn resultant_and_cycle_routes_agree(a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=3)) {
            let mut co: Vec<C64> = a.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            co.push(Complex64::new(1.0, 0.0));
            let f = Poly::new(co);
            for p in 1..=2 {
                let Ok(b) = multiplier_poly_cycles(&f, p) else { continue };
                let a = multiplier_poly_float(&f, p).unwrap();
                let scale = a.coeff_scale().max(1.0);
                for k in 0..=a.deg() {
                    prop_assert!((a.coeff(k) - b.coeff(k)).norm() <= 1e-6 * scale);
                }
            }
        }

        #[test]
        fn dynatomic_product_is_iterate(a in prop::collection::vec((-5i64..=5, 1i64..=4), 2..=4), p in 1usize..=3) {
            let mut co: Vec<Rational> = a.iter().map(|&(n, d)| rat(n, d)).collect();
            co.push(rat(1, 1) + rat(a[0].0.abs(), 1));
            let f = Poly::new(co);
            let factors = dynatomic_factors(&f, p).unwrap();
            let prod = factors.iter().fold(Poly::one(), |acc, (_, phi)| acc.mul(phi));
            prop_assert_eq!(prod, f.iterate(p as u32).unwrap().sub(&Poly::identity()));
        }
    }
}
