//! Normal forms and explicit coordinates on moduli of polynomial maps.
//!
//! Two polynomials are conjugate when `g = φ∘f∘φ^{-1}` for an affine
//! `φ(z) = αz + β`. Every class of degree `d` has a monic centered
//! representative `z^d + b_{d−2} z^{d−2} + ⋯ + b_0`, unique up to the action
//! `ω·f = Σ ω^{1−j} b_j z^j` of the `(d−1)`-th roots of unity, and a critically
//! marked representative `f_c(z) = ∫_0^z ∏(t − c_j) dt`.
//!
//! For degrees 2 and 3 the fixed-point σ-vector determines the class through
//! explicit polynomial formulas. For monic centered quartics
//! `z^4 + a_2 z^2 + a_1 z + a_0` the invariants are `α = a_1`, `β = a_0^3`,
//! `γ = a_2^3` and `δ = a_0 a_2`; they are recovered from `(s_1, s_2, s_4, t_2)`
//! (fixed-point σ's and the second period-2 σ) by elimination relations, with
//! composition pairs `h_1∘h_2`, `h_2∘h_1` as the only ambiguity.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::poly_core::field::{Field, Rational, Ring, C64};
use crate::poly_core::poly::Poly;
use crate::poly_core::roots::complex_roots;

/// Relative tolerance for the defining properties of float normal forms.
pub const FORM_TOL: f64 = 1e-9;
/// Relative coefficient tolerance of [`same_class`].
pub const SAME_CLASS_TOL: f64 = 1e-8;
/// Relative tolerance for validating float reconstruction candidates.
pub const RECONSTRUCT_TOL: f64 = 1e-7;

/// Which normal form a [`NormalFormRecord`] satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalForm {
    /// Leading coefficient 1, vanishing coefficient of `z^{d−1}`.
    MonicCentered,
    /// Leading coefficient `1/d` and `poly(0) = 0`.
    CriticallyMarked,
}

/// A normal form together with the affine map `φ(z) = αz + β` producing it
/// as `φ∘f∘φ^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormRecord<F> {
    /// The normal form satisfied by `poly`.
    pub form: NormalForm,
    /// The conjugated polynomial.
    pub poly: Poly<F>,
    /// Linear coefficient of `φ`.
    pub alpha: F,
    /// Constant term of `φ`.
    pub beta: F,
}

/// Invariants `(α, β, γ, δ)` of a monic centered quartic.
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticInvariants<F> {
    /// `a_1`.
    pub alpha: F,
    /// `a_0^3`.
    pub beta: F,
    /// `a_2^3`.
    pub gamma: F,
    /// `a_0 a_2`.
    pub delta: F,
}

fn degree_at_least_two<R: Ring>(f: &Poly<R>) -> Result<usize> {
    match f.degree() {
        Some(d) if d >= 2 => Ok(d),
        _ => Err(Error::InvalidInput("normal forms need deg f ≥ 2".into())),
    }
}

/// The conjugate `φ∘f∘φ^{-1}` with `φ(z) = αz + β`, that is
/// `α f((z − β)/α) + β`.
pub fn conjugate<F: Field>(f: &Poly<F>, alpha: F, beta: F) -> Result<Poly<F>> {
    if alpha.is_zero() {
        return Err(Error::InvalidInput("conjugating map needs α ≠ 0".into()));
    }
    let inv = alpha.inv()?;
    let phi_inv = Poly::new(vec![beta.neg().mul(&inv), inv]);
    Ok(f.compose(&phi_inv).scale(&alpha).add(&Poly::constant(beta)))
}

fn monic_centered_with<F: Field>(f: &Poly<F>, xi: F) -> Result<NormalFormRecord<F>> {
    let d = f.deg();
    let ad = f.coeff(d);
    let beta = f.coeff(d - 1).mul(&xi).div(&F::from_i64(d as i64).mul(&ad))?;
    let poly = conjugate(f, xi.clone(), beta.clone())?;
    Ok(NormalFormRecord { form: NormalForm::MonicCentered, poly, alpha: xi, beta })
}

/// Principal `n`-th root of a complex number.
pub fn principal_root(z: C64, n: u32) -> C64 {
    Complex64::from_polar(z.norm().powf(1.0 / n as f64), z.arg() / n as f64)
}

/// Monic centered conjugate of a float polynomial, using the principal
/// `(d−1)`-th root `ξ` of the leading coefficient.
pub fn to_monic_centered_float(f: &Poly<C64>) -> Result<NormalFormRecord<C64>> {
    let d = degree_at_least_two(f)?;
    let xi = principal_root(f.coeff(d), (d - 1) as u32);
    let mut rec = monic_centered_with(f, xi)?;
    // Both properties hold exactly in exact arithmetic; pin them against rounding.
    let mut co = rec.poly.into_coeffs();
    co[d] = Complex64::new(1.0, 0.0);
    co[d - 1] = Complex64::new(0.0, 0.0);
    rec.poly = Poly::new(co);
    Ok(rec)
}

/// Exact `n`-th root of a rational, when it exists.
pub fn rational_nth_root(q: &Rational, n: u32) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    if q.is_negative() && n.is_multiple_of(2) {
        return None;
    }
    let root_of = |x: &BigInt| -> Option<BigInt> {
        let mag = x.abs();
        let r = mag.nth_root(n);
        if r.pow(n) == mag {
            Some(if x.sign() == Sign::Minus { -r } else { r })
        } else {
            None
        }
    };
    Some(Rational::new(root_of(q.numer())?, root_of(q.denom())?))
}

/// Monic centered conjugate of an exact polynomial.
///
/// Fails with [`Error::RootUnavailable`] unless the leading coefficient is a
/// perfect `(d−1)`-th power in the rationals.
pub fn to_monic_centered_exact(f: &Poly<Rational>) -> Result<NormalFormRecord<Rational>> {
    let d = degree_at_least_two(f)?;
    let xi = rational_nth_root(&f.coeff(d), (d - 1) as u32).ok_or_else(|| {
        Error::RootUnavailable(format!("leading coefficient is not a rational {}-th power", d - 1))
    })?;
    monic_centered_with(f, xi)
}

/// True when `f` is monic and centered, up to `FORM_TOL` on the float backend.
pub fn is_monic_centered<F: Field>(f: &Poly<F>) -> bool {
    let Some(d) = f.degree() else { return false };
    if d < 2 {
        return false;
    }
    let tol = FORM_TOL * f.coeff_scale().max(1.0);
    f.coeff(d).sub(&F::one()).is_negligible(tol) && f.coeff(d - 1).is_negligible(tol)
}

fn require_monic_centered<F: Field>(f: &Poly<F>) -> Result<usize> {
    if is_monic_centered(f) {
        Ok(f.deg())
    } else {
        Err(Error::InvalidInput("expected a monic centered polynomial".into()))
    }
}

/// Sort key for complex numbers: magnitude, then argument.
pub fn magnitude_argument_order(a: &C64, b: &C64) -> Ordering {
    a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg()))
}

/// The critically marked polynomial `f_c(z) = ∫_0^z ∏(t − c_j) dt`.
pub fn ingram_poly<F: Field>(c: &[F]) -> Result<Poly<F>> {
    let prod = c
        .iter()
        .fold(Poly::one(), |acc: Poly<F>, cj| acc.mul(&Poly::new(vec![cj.neg(), F::one()])));
    let mut co = vec![F::zero()];
    for (k, a) in prod.coeffs().iter().enumerate() {
        co.push(a.div(&F::from_i64(k as i64 + 1))?);
    }
    Ok(Poly::new(co))
}

/// Critically marked conjugate `g = φ∘f∘φ^{-1}` with `φ(z) = α(z − w)`.
///
/// `w` is the fixed point of smallest magnitude (ties broken by argument) and
/// `α` the principal `(d−1)`-th root of `d·a_d`, so an input that is already
/// an `f_c` is returned unchanged. Also returns the critical points of `g`
/// sorted by magnitude and argument.
pub fn ingram_form(f: &Poly<C64>) -> Result<(NormalFormRecord<C64>, Vec<C64>)> {
    let d = degree_at_least_two(f)?;
    let mut fixed = complex_roots(&f.sub(&Poly::identity()))?;
    fixed.sort_by(magnitude_argument_order);
    let w = fixed[0];
    let alpha = principal_root(f.coeff(d) * d as f64, (d - 1) as u32);
    let beta = -alpha * w;
    let g = conjugate(f, alpha, beta)?;
    let crit_f = complex_roots(&f.derivative())?;
    let mut c: Vec<C64> = crit_f.iter().map(|&x| alpha * (x - w)).collect();
    c.sort_by(magnitude_argument_order);
    let mut co = g.into_coeffs();
    co[0] = Complex64::new(0.0, 0.0);
    co[d] = Complex64::new(1.0 / d as f64, 0.0);
    let rec = NormalFormRecord { form: NormalForm::CriticallyMarked, poly: Poly::new(co), alpha, beta };
    Ok((rec, c))
}

fn mu_act(f: &Poly<C64>, omega: C64) -> Poly<C64> {
    Poly::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(j, b)| b * omega.powi(1 - j as i32))
            .collect(),
    )
}

/// The orbit `{ω·f : ω^{d−1} = 1}` of a monic centered float polynomial,
/// listed by `ω = exp(2πik/(d−1))` for `k = 0..d−2`.
pub fn mu_orbit(f: &Poly<C64>) -> Result<Vec<Poly<C64>>> {
    let d = require_monic_centered(f)?;
    let n = d - 1;
    Ok((0..n)
        .map(|k| mu_act(f, Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)))
        .collect())
}

/// The orbit of a monic centered exact polynomial of degree 2 or 3, where all
/// roots of unity involved are rational.
pub fn mu_orbit_exact(f: &Poly<Rational>) -> Result<Vec<Poly<Rational>>> {
    let d = require_monic_centered(f)?;
    match d {
        2 => Ok(vec![f.clone()]),
        3 => {
            let mut g = f.coeffs().to_vec();
            g[0] = -g[0].clone();
            g[2] = -g[2].clone();
            Ok(vec![f.clone(), Poly::new(g)])
        }
        _ => Err(Error::BackendMismatch("μ_{d−1} has irrational elements for d ≥ 4".into())),
    }
}

/// Whether two float polynomials are affinely conjugate.
///
/// Compares the monic centered form of `g` against every element of the
/// `μ_{d−1}`-orbit of the monic centered form of `f`; coefficients must agree
/// within `SAME_CLASS_TOL` relative to the coefficient scale.
pub fn same_class(f: &Poly<C64>, g: &Poly<C64>) -> Result<bool> {
    if f.degree() != g.degree() {
        return Ok(false);
    }
    let nf = to_monic_centered_float(f)?.poly;
    let ng = to_monic_centered_float(g)?.poly;
    let scale = nf.coeff_scale().max(ng.coeff_scale()).max(1.0);
    Ok(mu_orbit(&nf)?.iter().any(|h| {
        h.coeffs()
            .iter()
            .zip(ng.coeffs())
            .all(|(a, b)| (a - b).norm() <= SAME_CLASS_TOL * scale)
    }))
}

fn q<F: Field>(num: i64, den: i64) -> F {
    F::from_rational(&Rational::new(num.into(), den.into()))
}

/// Evaluate `Σ (num/den) ∏ x_i^{e_i}` for a list of terms `(num, den, e)`.
fn eval_terms<F: Field, const N: usize>(terms: &[(i64, i64, [u32; N])], x: &[F; N]) -> F {
    terms.iter().fold(F::zero(), |acc, (num, den, e)| {
        let mono = e.iter().zip(x).fold(q::<F>(*num, *den), |m, (&k, xi)| m.mul(&xi.powu(k as u64)));
        acc.add(&mono)
    })
}

/// Moduli coordinates of a monic centered polynomial of degree 2 or 3:
/// `(a_0)` for quadratics and `(α, β) = (a_1, a_0^2)` for cubics.
pub fn low_degree_coordinates<F: Field>(f: &Poly<F>) -> Result<Vec<F>> {
    match require_monic_centered(f)? {
        2 => Ok(vec![f.coeff(0)]),
        3 => Ok(vec![f.coeff(1), f.coeff(0).mul(&f.coeff(0))]),
        d => Err(Error::InvalidInput(format!("explicit coordinates exist for d ∈ {{2, 3}}, got {d}"))),
    }
}

/// Moduli coordinates from the fixed-point σ-vector, for `d ∈ {2, 3}`.
///
/// Quadratics: `a_0 = σ_2/4`. Cubics: `α = −s_1/3 + 2` and
/// `β = (4/729)s_1^3 − (4/81)s_1^2 + (1/9)s_1 + (1/27)s_3 − 2/27`.
pub fn low_degree_class_from_spectrum<F: Field>(d: usize, sigma: &[F]) -> Result<Vec<F>> {
    match (d, sigma.len()) {
        (2, 2) => Ok(vec![sigma[1].mul(&q(1, 4))]),
        (3, 3) => {
            let x = [sigma[0].clone(), sigma[2].clone()];
            let alpha = eval_terms(&[(-1, 3, [1, 0]), (2, 1, [0, 0])], &x);
            let beta = eval_terms(
                &[(4, 729, [3, 0]), (-4, 81, [2, 0]), (1, 9, [1, 0]), (1, 27, [0, 1]), (-2, 27, [0, 0])],
                &x,
            );
            Ok(vec![alpha, beta])
        }
        (2 | 3, n) => Err(Error::InvalidInput(format!("degree {d} needs {d} σ values, got {n}"))),
        _ => Err(Error::InvalidInput(format!("explicit coordinates exist for d ∈ {{2, 3}}, got {d}"))),
    }
}

/// Fixed-point σ-vector from moduli coordinates, for `d ∈ {2, 3}`.
///
/// Quadratics: `(2, 4a_0)`. Cubics: `s_1 = −3α + 6`, `s_2 = −6α + 9`,
/// `s_3 = 4α^3 − 12α^2 + 9α + 27β`.
pub fn low_degree_spectrum_from_class<F: Field>(d: usize, coords: &[F]) -> Result<Vec<F>> {
    match (d, coords.len()) {
        (2, 1) => Ok(vec![F::from_i64(2), coords[0].mul(&F::from_i64(4))]),
        (3, 2) => {
            let x = [coords[0].clone(), coords[1].clone()];
            Ok(vec![
                eval_terms(&[(-3, 1, [1, 0]), (6, 1, [0, 0])], &x),
                eval_terms(&[(-6, 1, [1, 0]), (9, 1, [0, 0])], &x),
                eval_terms(&[(4, 1, [3, 0]), (-12, 1, [2, 0]), (9, 1, [1, 0]), (27, 1, [0, 1])], &x),
            ])
        }
        _ => Err(Error::InvalidInput(format!("no explicit coordinates for d = {d} with {} values", coords.len()))),
    }
}

/// Invariants of a monic centered quartic.
pub fn quartic_invariants<F: Field>(f: &Poly<F>) -> Result<QuarticInvariants<F>> {
    if require_monic_centered(f)? != 4 {
        return Err(Error::InvalidInput("quartic invariants need degree 4".into()));
    }
    let (a0, a1, a2) = (f.coeff(0), f.coeff(1), f.coeff(2));
    Ok(QuarticInvariants {
        alpha: a1,
        beta: a0.powu(3),
        gamma: a2.powu(3),
        delta: a0.mul(&a2),
    })
}

/// `(s_1, s_2, s_4, t_2)` of the class with the given invariants.
pub fn quartic_forward<F: Field>(inv: &QuarticInvariants<F>) -> [F; 4] {
    let x = [inv.alpha.clone(), inv.beta.clone(), inv.gamma.clone(), inv.delta.clone()];
    let s1 = eval_terms(&[(-8, 1, [1, 0, 0, 0]), (12, 1, [0, 0, 0, 0])], &x);
    let s2 = eval_terms(
        &[
            (18, 1, [2, 0, 0, 0]),
            (-60, 1, [1, 0, 0, 0]),
            (4, 1, [0, 0, 1, 0]),
            (-16, 1, [0, 0, 0, 1]),
            (48, 1, [0, 0, 0, 0]),
        ],
        &x,
    );
    let s4 = eval_terms(
        &[
            (-27, 1, [4, 0, 0, 0]),
            (108, 1, [3, 0, 0, 0]),
            (-4, 1, [2, 0, 1, 0]),
            (144, 1, [2, 0, 0, 1]),
            (-144, 1, [2, 0, 0, 0]),
            (8, 1, [1, 0, 1, 0]),
            (-288, 1, [1, 0, 0, 1]),
            (16, 1, [0, 0, 1, 1]),
            (-128, 1, [0, 0, 0, 2]),
            (64, 1, [1, 0, 0, 0]),
            (256, 1, [0, 1, 0, 0]),
            (128, 1, [0, 0, 0, 1]),
        ],
        &x,
    );
    let t2 = eval_terms(
        &[
            (27, 1, [4, 0, 0, 0]),
            (324, 1, [3, 0, 0, 0]),
            (4, 1, [2, 0, 1, 0]),
            (-144, 1, [2, 0, 0, 1]),
            (1440, 1, [2, 0, 0, 0]),
            (24, 1, [1, 0, 1, 0]),
            (-864, 1, [1, 0, 0, 1]),
            (-16, 1, [0, 0, 1, 1]),
            (128, 1, [0, 0, 0, 2]),
            (2880, 1, [1, 0, 0, 0]),
            (-256, 1, [0, 1, 0, 0]),
            (96, 1, [0, 0, 1, 0]),
            (-512, 1, [0, 0, 0, 1]),
            (3840, 1, [0, 0, 0, 0]),
        ],
        &x,
    );
    [s1, s2, s4, t2]
}

/// Spectral data `(s_1, s_2, s_4, t_2)` of a quartic: the first, second and
/// fourth fixed-point σ's and the second period-2 σ.
pub fn quartic_spectral_data<F: Field>(sigma1: &[F], sigma2: &[F]) -> Result<[F; 4]> {
    if sigma1.len() != 4 || sigma2.len() != 6 {
        return Err(Error::InvalidInput("quartic spectra have 4 fixed-point and 6 period-2 σ's".into()));
    }
    Ok([sigma1[0].clone(), sigma1[1].clone(), sigma1[3].clone(), sigma2[1].clone()])
}

/// Coefficients `(A, B)` of the linear relation `A δ + B = 0`.
fn delta_linear<F: Field>(s: &[F; 4]) -> (F, F) {
    let a = eval_terms(&[(2048, 1, [1, 0, 0, 0]), (-24576, 1, [0, 0, 0, 0])], s);
    let b = eval_terms(
        &[
            (-9, 1, [3, 0, 0, 0]),
            (660, 1, [2, 0, 0, 0]),
            (-16, 1, [1, 1, 0, 0]),
            (-19952, 1, [1, 0, 0, 0]),
            (576, 1, [0, 1, 0, 0]),
            (-16, 1, [0, 0, 1, 0]),
            (-16, 1, [0, 0, 0, 1]),
            (202944, 1, [0, 0, 0, 0]),
        ],
        s,
    );
    (a, b)
}

/// Coefficients `(A, B, C)` of the quadratic relation `A δ^2 + B δ + C = 0`.
fn delta_quadratic<F: Field>(s: &[F; 4]) -> (F, F, F) {
    let a = F::from_i64(1_048_576);
    let b = eval_terms(
        &[
            (512 * 315, 1, [2, 0, 0, 0]),
            (512 * 4, 1, [0, 2, 0, 0]),
            (-512 * 3624, 1, [1, 0, 0, 0]),
            (-512 * 352, 1, [0, 1, 0, 0]),
            (-512 * 12, 1, [0, 0, 1, 0]),
            (512 * 4, 1, [0, 0, 0, 1]),
            (-512 * 9552, 1, [0, 0, 0, 0]),
        ],
        s,
    );
    let c = eval_terms(
        &[
            (-9, 1, [2, 2, 0, 0]),
            (3672, 1, [2, 1, 0, 0]),
            (81, 1, [2, 0, 1, 0]),
            (-63, 1, [2, 0, 0, 1]),
            (-24, 1, [1, 2, 0, 0]),
            (-344240, 1, [2, 0, 0, 0]),
            (-124416, 1, [1, 1, 0, 0]),
            (1168, 1, [1, 0, 1, 0]),
            (784, 1, [1, 0, 0, 1]),
            (4848, 1, [0, 2, 0, 0]),
            (-672, 1, [0, 1, 1, 0]),
            (-160, 1, [0, 1, 0, 1]),
            (1, 1, [0, 0, 2, 0]),
            (2, 1, [0, 0, 1, 1]),
            (1, 1, [0, 0, 0, 2]),
            (7144320, 1, [1, 0, 0, 0]),
            (1537152, 1, [0, 1, 0, 0]),
            (-12432, 1, [0, 0, 1, 0]),
            (-11664, 1, [0, 0, 0, 1]),
            (-12936960, 1, [0, 0, 0, 0]),
        ],
        s,
    );
    (a, b, c)
}

fn beta_from<F: Field>(s: &[F; 4], delta: &F) -> F {
    let x = [s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone(), delta.clone()];
    eval_terms(
        &[
            (-3, 2048, [2, 0, 0, 0, 1]),
            (3, 65536, [2, 1, 0, 0, 0]),
            (1, 4, [0, 0, 0, 0, 2]),
            (31, 256, [1, 0, 0, 0, 1]),
            (-1, 64, [0, 1, 0, 0, 1]),
            (103, 16384, [2, 0, 0, 0, 0]),
            (-1, 2048, [1, 1, 0, 0, 0]),
            (-1, 65536, [1, 0, 1, 0, 0]),
            (-1, 65536, [1, 0, 0, 1, 0]),
            (-127, 128, [0, 0, 0, 0, 1]),
            (-1007, 2048, [1, 0, 0, 0, 0]),
            (69, 4096, [0, 1, 0, 0, 0]),
            (55, 16384, [0, 0, 1, 0, 0]),
            (-9, 16384, [0, 0, 0, 1, 0]),
            (7131, 1024, [0, 0, 0, 0, 0]),
        ],
        &x,
    )
}

fn gamma_from<F: Field>(s: &[F; 4], delta: &F) -> F {
    let x = [s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone(), delta.clone()];
    eval_terms(
        &[
            (-9, 128, [2, 0, 0, 0, 0]),
            (4, 1, [0, 0, 0, 0, 1]),
            (-3, 16, [1, 0, 0, 0, 0]),
            (1, 4, [0, 1, 0, 0, 0]),
            (3, 8, [0, 0, 0, 0, 0]),
        ],
        &x,
    )
}

/// Residuals of the five reconstruction relations at `(inv, s)`, in the order
/// alpha, delta (linear), delta (quadratic), beta, gamma. All vanish exactly
/// when `s` is the spectral data of a quartic with invariants `inv`.
pub fn quartic_relation_residuals<F: Field>(inv: &QuarticInvariants<F>, s: &[F; 4]) -> [F; 5] {
    let alpha = eval_terms(&[(-1, 8, [1, 0, 0, 0]), (3, 2, [0, 0, 0, 0])], s);
    let (la, lb) = delta_linear(s);
    let (qa, qb, qc) = delta_quadratic(s);
    let d = &inv.delta;
    [
        inv.alpha.sub(&alpha),
        la.mul(d).add(&lb),
        qa.mul(&d.mul(d)).add(&qb.mul(d)).add(&qc),
        inv.beta.sub(&beta_from(s, d)),
        inv.gamma.sub(&gamma_from(s, d)),
    ]
}

/// Value of `64β − γ^2 + 12γδ − 48δ^2 − 8γ`.
///
/// On `h_1∘h_2` with `h_i = z^2 + c_i` it equals `64(c_1^3 − c_2^3)`, so together
/// with `α = 0` it cuts out the classes with `[h_1∘h_2] = [h_2∘h_1]`.
pub fn commuting_locus_equation<F: Field>(inv: &QuarticInvariants<F>) -> F {
    let x = [inv.beta.clone(), inv.gamma.clone(), inv.delta.clone()];
    eval_terms(
        &[(64, 1, [1, 0, 0]), (-1, 1, [0, 2, 0]), (12, 1, [0, 1, 1]), (-48, 1, [0, 0, 2]), (-8, 1, [0, 1, 0])],
        &x,
    )
}

fn reconstruct_with<F: Field>(
    s: &[F; 4],
    degenerate: bool,
    quadratic_roots: impl Fn(&F, &F, &F) -> Vec<F>,
    tol: f64,
) -> Result<Vec<QuarticInvariants<F>>> {
    let alpha = eval_terms(&[(-1, 8, [1, 0, 0, 0]), (3, 2, [0, 0, 0, 0])], s);
    let deltas = if degenerate {
        let (a, b, c) = delta_quadratic(s);
        quadratic_roots(&a, &b, &c)
    } else {
        let (a, b) = delta_linear(s);
        vec![b.neg().div(&a)?]
    };
    let s_scale = s.iter().map(Field::magnitude).fold(1.0, f64::max);
    let candidates: Vec<_> = deltas
        .into_iter()
        .map(|delta| QuarticInvariants {
            alpha: alpha.clone(),
            beta: beta_from(s, &delta),
            gamma: gamma_from(s, &delta),
            delta,
        })
        .filter(|inv| {
            let cubic_scale = (inv.beta.magnitude() * inv.gamma.magnitude())
                .max(inv.delta.magnitude().powi(3))
                .max(1.0);
            let cubic_ok = inv.beta.mul(&inv.gamma).sub(&inv.delta.powu(3)).is_negligible(tol * cubic_scale);
            let forward = quartic_forward(inv);
            cubic_ok && forward.iter().zip(s).all(|(a, b)| a.sub(b).is_negligible(tol * s_scale))
        })
        .collect();
    if candidates.is_empty() {
        Err(Error::CheckFailed("no quartic class has this spectral data".into()))
    } else {
        Ok(candidates)
    }
}

/// Quartic classes with spectral data `(s_1, s_2, s_4, t_2)`, exactly.
///
/// Off `s_1 = 12` the answer is unique. On `s_1 = 12` both roots of the
/// quadratic relation are tried; composition pairs give the two classes
/// `[h_1∘h_2]` and `[h_2∘h_1]` (equal on the commuting locus). Every candidate
/// must satisfy `βγ = δ^3` and reproduce the spectral data.
pub fn quartic_reconstruct_exact(s: &[Rational; 4]) -> Result<Vec<QuarticInvariants<Rational>>> {
    let degenerate = s[0] == Rational::from_integer(12.into());
    reconstruct_with(
        s,
        degenerate,
        |a, b, c| {
            let disc = b * b - Rational::from_integer(4.into()) * a * c;
            let Some(root) = rational_nth_root(&disc, 2) else { return Vec::new() };
            let two_a = a * Rational::from_integer(2.into());
            vec![(-b - &root) / &two_a, (-b + &root) / &two_a]
        },
        0.0,
    )
}

/// Float version of [`quartic_reconstruct_exact`]; `s_1` within `FORM_TOL`
/// of 12 counts as the degenerate case.
pub fn quartic_reconstruct(s: &[C64; 4]) -> Result<Vec<QuarticInvariants<C64>>> {
    let degenerate = (s[0] - 12.0).norm() <= FORM_TOL * s[0].norm().max(1.0);
    reconstruct_with(
        s,
        degenerate,
        |a, b, c| {
            let root = (b * b - 4.0 * a * c).sqrt();
            vec![(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)]
        },
        RECONSTRUCT_TOL,
    )
}

/// A monic centered quartic with the given invariants.
///
/// `a_0` is the principal cube root of `β` and `a_2 = δ/a_0`, or the principal
/// cube root of `γ` when `a_0 = 0`; other cube-root choices give the other
/// members of the `μ_3`-orbit.
pub fn quartic_representative(inv: &QuarticInvariants<C64>) -> Poly<C64> {
    let a0 = principal_root(inv.beta, 3);
    let a2 = if a0.norm() > 0.0 { inv.delta / a0 } else { principal_root(inv.gamma, 3) };
    let zero = Complex64::new(0.0, 0.0);
    Poly::new(vec![a0, inv.alpha, a2, zero, Complex64::new(1.0, 0.0)])
}

/// The pair `(h_1∘h_2, h_2∘h_1)`, which share every multiplier spectrum.
pub fn compose_pair<F: Field>(h1: &Poly<F>, h2: &Poly<F>) -> Result<(Poly<F>, Poly<F>)> {
    degree_at_least_two(h1)?;
    degree_at_least_two(h2)?;
    Ok((h1.compose(h2), h2.compose(h1)))
}

/// Split a monic centered quartic with `a_1 = 0` as `(z^2 + c_1)∘(z^2 + c_2)`
/// with `c_2 = a_2/2` and `c_1 = a_0 − c_2^2`.
///
/// On the float backend `a_1` may be as large as `FORM_TOL` times the
/// coefficient scale.
pub fn quartic_decompose<F: Field>(f: &Poly<F>) -> Result<(Poly<F>, Poly<F>)> {
    if require_monic_centered(f)? != 4 {
        return Err(Error::InvalidInput("quartic decomposition needs degree 4".into()));
    }
    if !f.coeff(1).is_negligible(FORM_TOL * f.coeff_scale().max(1.0)) {
        return Err(Error::InvalidInput("a_1 ≠ 0: the quartic is not a composition of quadratics".into()));
    }
    let c2 = f.coeff(2).div(&F::from_i64(2))?;
    let c1 = f.coeff(0).sub(&c2.mul(&c2));
    Ok((Poly::new(vec![c1, F::zero(), F::one()]), Poly::new(vec![c2, F::zero(), F::one()])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::rat;
    use crate::spectra::{mult_morphism, multiplier_poly_exact, sigma_from_chi};
    use proptest::prelude::*;

    fn all_zero(v: &[Rational]) -> bool {
        v.iter().all(|x| x == &rat(0, 1))
    }

    fn rp(v: &[(i64, i64)]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn cp(v: &[f64]) -> Poly<C64> {
        Poly::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    fn c(re: f64, im: f64) -> C64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monic_centered_examples() {
        let rec = to_monic_centered_exact(&rp(&[(0, 1), (0, 1), (2, 1)])).unwrap();
        assert_eq!(rec.poly, rp(&[(0, 1), (0, 1), (1, 1)]));
        assert_eq!((rec.alpha.clone(), rec.beta.clone()), (rat(2, 1), rat(0, 1)));
        // z^2 + bz + c with b = 3, c = 5: c + b/2 − b^2/4 = 5 + 3/2 − 9/4.
        let rec = to_monic_centered_exact(&rp(&[(5, 1), (3, 1), (1, 1)])).unwrap();
        assert_eq!(rec.poly, Poly::new(vec![rat(5, 1) + rat(3, 2) - rat(9, 4), rat(0, 1), rat(1, 1)]));
        assert_eq!(rec.beta, rat(3, 2));
        assert!(matches!(
            to_monic_centered_exact(&rp(&[(0, 1), (0, 1), (0, 1), (2, 1)])),
            Err(Error::RootUnavailable(_))
        ));
        let f = Poly::new(vec![c(0.3, 1.0), c(-2.0, 0.5), c(1.0, 1.0), c(0.7, -3.0), c(2.0, 1.5)]);
        let rec = to_monic_centered_float(&f).unwrap();
        assert!(rec.poly.coeff(3).norm() < 1e-12);
        assert!(same_class(&f, &rec.poly).unwrap());
    }

    #[test]
    fn rational_roots_of_rationals() {
        assert_eq!(rational_nth_root(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(rational_nth_root(&rat(4, 9), 2), Some(rat(2, 3)));
        assert_eq!(rational_nth_root(&rat(-4, 9), 2), None);
        assert_eq!(rational_nth_root(&rat(2, 1), 2), None);
    }

    #[test]
    fn ingram_examples() {
        let (rec, c0) = ingram_form(&cp(&[0.0, 0.0, 0.5])).unwrap();
        assert!((rec.poly.coeff(2) - 0.5).norm() < 1e-12);
        assert!(c0[0].norm() < 1e-12);
        let cs = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let f = ingram_poly(&cs).unwrap();
        assert_eq!(f.derivative(), cs.iter().fold(Poly::one(), |a, &r| a.mul(&Poly::new(vec![-r, c(1.0, 0.0)]))));
        let (rec, got) = ingram_form(&f).unwrap();
        assert!((rec.poly.coeff(4) - 0.25).norm() < 1e-12);
        for (a, b) in got.iter().zip(&cs) {
            assert!((a - b).norm() < 1e-8, "{got:?}");
        }
        let g = conjugate(&f, c(0.5, 2.0), c(-1.0, 3.0)).unwrap();
        let (rec, crit) = ingram_form(&g).unwrap();
        assert!((rec.poly.coeff(4) - 0.25).norm() < 1e-12);
        assert!(rec.poly.coeff(0).norm() < 1e-12);
        let expected = ingram_poly(&crit).unwrap();
        for k in 0..=4 {
            assert!((rec.poly.coeff(k) - expected.coeff(k)).norm() < 1e-8);
        }
    }

    #[test]
    fn ingram_poly_is_exact() {
        let cs = [rat(1, 2), rat(-3, 1), rat(2, 7)];
        let f = ingram_poly(&cs).unwrap();
        assert_eq!(f.coeff(0), rat(0, 1));
        assert_eq!(f.coeff(4), rat(1, 4));
        let df = cs.iter().fold(Poly::one(), |a, r| a.mul(&Poly::new(vec![-r.clone(), rat(1, 1)])));
        assert_eq!(f.derivative(), df);
    }

    #[test]
    fn mu_orbit_examples() {
        let f2 = cp(&[0.3, 0.0, 1.0]);
        assert_eq!(mu_orbit(&f2).unwrap().len(), 1);
        let f3 = rp(&[(2, 1), (5, 1), (0, 1), (1, 1)]);
        assert_eq!(mu_orbit_exact(&f3).unwrap()[1], rp(&[(-2, 1), (5, 1), (0, 1), (1, 1)]));
        let f4 = cp(&[1.0, 1.0, 1.0, 0.0, 1.0]);
        let orbit = mu_orbit(&f4).unwrap();
        assert_eq!(orbit.len(), 3);
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((orbit[1].coeff(2) - w.inv()).norm() < 1e-15);
        assert!((orbit[1].coeff(0) - w).norm() < 1e-15);
        assert!((orbit[1].coeff(1) - 1.0).norm() < 1e-15);
        assert!(mu_orbit(&cp(&[1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn same_class_examples() {
        assert!(!same_class(&cp(&[1.0, 0.0, 0.0, 0.0, 1.0]), &cp(&[1.0, 0.0, 2.0, 0.0, 1.0])).unwrap());
        assert!(same_class(&cp(&[1.0, 1.0, 0.0, 1.0]), &cp(&[-1.0, 1.0, 0.0, 1.0])).unwrap());
        assert!(!same_class(&cp(&[1.0, 1.0, 0.0, 1.0]), &cp(&[1.0, 2.0, 0.0, 1.0])).unwrap());
    }

    #[test]
    fn low_degree_examples() {
        assert_eq!(low_degree_class_from_spectrum(2, &[rat(2, 1), rat(12, 1)]).unwrap(), vec![rat(3, 1)]);
        assert_eq!(
            low_degree_class_from_spectrum(3, &[rat(6, 1), rat(9, 1), rat(0, 1)]).unwrap(),
            vec![rat(0, 1), rat(0, 1)]
        );
        assert!(low_degree_class_from_spectrum(4, &vec![rat(1, 1); 4]).is_err());
        let sigma = mult_morphism(&rp(&[(0, 1), (0, 1), (0, 1), (1, 1)]), 1).unwrap();
        assert_eq!(sigma[0], vec![rat(6, 1), rat(9, 1), rat(0, 1)]);
    }

    #[test]
    fn quartic_invariant_examples() {
        let z4 = rp(&[(0, 1), (0, 1), (0, 1), (0, 1), (1, 1)]);
        let zero = rat(0, 1);
        assert_eq!(
            quartic_invariants(&z4).unwrap(),
            QuarticInvariants { alpha: zero.clone(), beta: zero.clone(), gamma: zero.clone(), delta: zero }
        );
        let one = rat(1, 1);
        let f = rp(&[(1, 1), (1, 1), (1, 1), (0, 1), (1, 1)]);
        assert_eq!(
            quartic_invariants(&f).unwrap(),
            QuarticInvariants { alpha: one.clone(), beta: one.clone(), gamma: one.clone(), delta: one }
        );
        let g = cp(&[0.4, -1.2, 0.9, 0.0, 1.0]);
        let base = quartic_invariants(&g).unwrap();
        for h in mu_orbit(&g).unwrap() {
            let i = quartic_invariants(&h).unwrap();
            for (a, b) in [(i.alpha, base.alpha), (i.beta, base.beta), (i.gamma, base.gamma), (i.delta, base.delta)] {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    fn spectral_data(f: &Poly<Rational>) -> [Rational; 4] {
        let s1 = sigma_from_chi(&multiplier_poly_exact(f, 1).unwrap());
        let s2 = sigma_from_chi(&multiplier_poly_exact(f, 2).unwrap());
        quartic_spectral_data(&s1, &s2).unwrap()
    }

    #[test]
    fn relations_and_reconstruction_generic() {
        let f = rp(&[(2, 3), (-1, 5), (3, 7), (0, 1), (1, 1)]);
        let s = spectral_data(&f);
        let inv = quartic_invariants(&f).unwrap();
        assert_eq!(quartic_forward(&inv), s);
        assert!(all_zero(&quartic_relation_residuals(&inv, &s)));
        assert_eq!(quartic_reconstruct_exact(&s).unwrap(), vec![inv.clone()]);
        let sf = s.clone().map(|x| Complex64::new(crate::poly_core::field::rational_to_f64(&x), 0.0));
        let got = quartic_reconstruct(&sf).unwrap();
        assert_eq!(got.len(), 1);
        let rep = quartic_representative(&got[0]);
        assert!(same_class(&rep, &crate::poly_core::json::to_float_poly(&f)).unwrap());
    }

    #[test]
    fn reconstruction_of_composition_pairs() {
        let h1 = rp(&[(1, 2), (0, 1), (1, 1)]);
        let h2 = rp(&[(-2, 3), (0, 1), (1, 1)]);
        let (f, g) = compose_pair(&h1, &h2).unwrap();
        assert_eq!(f.coeff(0), rat(4, 9) + rat(1, 2));
        assert_eq!(f.coeff(2), rat(-4, 3));
        let s = spectral_data(&f);
        assert_eq!(s[0], rat(12, 1));
        assert_eq!(spectral_data(&g), s);
        let mut got = quartic_reconstruct_exact(&s).unwrap();
        let mut want = vec![quartic_invariants(&f).unwrap(), quartic_invariants(&g).unwrap()];
        let key = |i: &QuarticInvariants<Rational>| i.delta.clone();
        got.sort_by_key(key);
        want.sort_by_key(key);
        assert_eq!(got, want);
        assert_ne!(got[0], got[1]);
        let (d1, d2) = quartic_decompose(&f).unwrap();
        assert_eq!((d1, d2), (h1.clone(), h2.clone()));
        // h1 = h2 lies on the commuting locus and gives coincident candidates.
        let (ff, _) = compose_pair(&h1, &h1).unwrap();
        let inv = quartic_invariants(&ff).unwrap();
        assert_eq!(commuting_locus_equation(&inv), rat(0, 1));
        let got = quartic_reconstruct_exact(&spectral_data(&ff)).unwrap();
        assert_eq!(got, vec![inv.clone(), inv]);
    }

    #[test]
    fn decomposition_examples() {
        let z2 = rp(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(quartic_decompose(&rp(&[(0, 1), (0, 1), (0, 1), (0, 1), (1, 1)])).unwrap(), (z2.clone(), z2.clone()));
        let z2p1 = rp(&[(1, 1), (0, 1), (1, 1)]);
        assert_eq!(quartic_decompose(&rp(&[(2, 1), (0, 1), (2, 1), (0, 1), (1, 1)])).unwrap(), (z2p1.clone(), z2p1.clone()));
        assert_eq!(quartic_decompose(&rp(&[(1, 1), (0, 1), (0, 1), (0, 1), (1, 1)])).unwrap(), (z2p1.clone(), z2.clone()));
        assert!(quartic_decompose(&rp(&[(1, 1), (1, 1), (0, 1), (0, 1), (1, 1)])).is_err());
        let (f, g) = compose_pair(&z2p1, &z2).unwrap();
        assert_eq!(f, rp(&[(1, 1), (0, 1), (0, 1), (0, 1), (1, 1)]));
        assert_eq!(g, rp(&[(1, 1), (0, 1), (2, 1), (0, 1), (1, 1)]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn cubic_roundtrip_is_exact(a1 in (-20i64..20, 1i64..9), a0 in (-20i64..20, 1i64..9),
                                    lead in 1i64..5, shift in (-9i64..9, 1i64..5)) {
            let mc = Poly::new(vec![rat(a0.0, a0.1), rat(a1.0, a1.1), rat(0, 1), rat(1, 1)]);
            let f = conjugate(&mc, rat(lead, 1).inv().unwrap(), rat(shift.0, shift.1)).unwrap();
            let rec = to_monic_centered_exact(&f).unwrap();
            let coords = low_degree_coordinates(&rec.poly).unwrap();
            prop_assert_eq!(&coords, &low_degree_coordinates(&mc).unwrap());
            let sigma = sigma_from_chi(&multiplier_poly_exact(&f, 1).unwrap());
            prop_assert_eq!(&low_degree_class_from_spectrum(3, &sigma).unwrap(), &coords);
            prop_assert_eq!(low_degree_spectrum_from_class(3, &coords).unwrap(), sigma);
        }

        #[test]
        fn same_class_under_mu_and_conjugation(a in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3),
                                               alpha in (0.3f64..2.0, -1.0f64..1.0), beta in (-1.0f64..1.0, -1.0f64..1.0)) {
            let mut co: Vec<C64> = a.iter().map(|&(x, y)| c(x, y)).collect();
            co.extend([c(0.0, 0.0), c(1.0, 0.0)]);
            let f = Poly::new(co);
            for h in mu_orbit(&f).unwrap() {
                prop_assert!(same_class(&f, &h).unwrap());
            }
            let g = conjugate(&f, c(alpha.0, alpha.1), c(beta.0, beta.1)).unwrap();
            prop_assert!(same_class(&f, &g).unwrap());
            let inv = quartic_invariants(&f).unwrap();
            prop_assert!((inv.beta * inv.gamma - inv.delta.powi(3)).norm() < 1e-9 * (1.0 + inv.delta.norm().powi(3)));
        }
    }
}
