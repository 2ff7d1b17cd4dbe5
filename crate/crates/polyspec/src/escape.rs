//! Green functions, escape rates and characteristic exponents over the
//! complex numbers.
//!
//! The Green function `g_f(z) = lim d^{−n} log⁺|f^{∘n}(z)|` is evaluated by
//! iterating until the orbit leaves a disk of radius `R_f` on which
//! `|f(w)| ≥ max(2|w|, (|a_d|/2)|w|^d)`, and then bounding the remaining tail
//! geometrically. Iterates are held with an extended exponent, so huge orbits
//! never overflow. The maximal and minimal escape rates `M_f`, `m_f` are the
//! extreme Green values at the critical points, and the characteristic
//! exponents `M_f^(p)`, `m_f^(p)` are the extreme values of `(1/p) log|λ|`
//! over the period-`p` multipliers.
//!
//! On top of these sit the inequality checkers relating the two families of
//! quantities, a prediction for the number of components of the sublevel set
//! `{g_f < M_f}`, and the two explicit degenerating families whose exponents
//! grow at the extremal rates, with least-squares slope fitting.

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moduli::ingram_poly;
use crate::poly_core::ext::ExtC;
use crate::poly_core::field::{rational_to_f64, Field, Rational, C64};
use crate::poly_core::json::to_float_poly;
use crate::poly_core::poly::Poly;
use crate::poly_core::roots::complex_roots;
use crate::spectra::{spectrum_exact, spectrum_float, MultiplierSpectrum};

/// Iteration cap of [`green`]; orbits that stay in the escape disk this long
/// are reported as bounded at this resolution.
pub const ESCAPE_CAP: usize = 10_000;
/// Default tail tolerance for Green values.
pub const GREEN_TOL: f64 = 1e-12;
/// Relative tolerance for a critical point to attain `M_f` in
/// [`component_count`].
pub const ATTAIN_TOL: f64 = 1e-4;
/// Iterates below `2^-UNDERFLOW_LOG2` in modulus are replaced by 0.
const UNDERFLOW_LOG2: f64 = 1e4;
/// Allowance for multiplier and critical-point rounding in the inequality
/// checks, relative to `max(1, M_f)`.
pub const ROOT_BUDGET: f64 = 1e-8;

/// A Green function value with its a-priori error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenValue {
    /// Approximation of `g_f(z)`.
    pub value: f64,
    /// Bound on `|value − g_f(z)|`.
    pub error: f64,
    /// The orbit left the escape disk before the iteration cap.
    pub escaped: bool,
    /// Iterations performed.
    pub iterations: usize,
}

/// Green values at the critical points and the resulting escape rates.
#[derive(Clone, Debug, PartialEq)]
pub struct EscapeReport {
    /// Maximal escape rate `M_f`.
    pub max: f64,
    /// Minimal escape rate `m_f`.
    pub min: f64,
    /// Every critical point (with multiplicity) and its Green value.
    pub per_critical: Vec<(C64, GreenValue)>,
}

impl EscapeReport {
    /// Largest error bound among the critical Green values.
    pub fn error(&self) -> f64 {
        self.per_critical.iter().map(|(_, g)| g.error).fold(0.0, f64::max)
    }

    /// Every critical orbit escapes, so `m_f > 0`.
    pub fn all_escape(&self) -> bool {
        self.per_critical.iter().all(|(_, g)| g.escaped)
    }
}

/// Extreme characteristic exponents of one period.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentReport {
    /// Period.
    pub p: usize,
    /// `M_f^(p) = max (1/p) log|λ|` (−∞ when every multiplier vanishes).
    pub max: f64,
    /// `m_f^(p) = min (1/p) log⁺|λ|`.
    pub min: f64,
    /// The multipliers.
    pub spectrum: MultiplierSpectrum,
}

/// Escape radius `R_f` for a float polynomial.
///
/// With `S = Σ_{j<d} |a_j|`, every `|w| ≥ R_f` satisfies
/// `|f(w)| ≥ max(2|w|, (|a_d|/2)|w|^d)`: it is the largest of
/// `((2(1 + S))/|a_d|)^{1/(d−1)}`, `2`, `2S/|a_d|` and `(4/|a_d|)^{1/(d−1)}`.
pub fn escape_radius(f: &Poly<C64>) -> f64 {
    let d = f.deg();
    let ad = f.coeff(d).norm();
    let s: f64 = f.coeffs()[..d].iter().map(|c| c.norm()).sum();
    let e = 1.0 / (d as f64 - 1.0);
    (2.0 * (1.0 + s) / ad).powf(e).max(2.0).max(2.0 * s / ad).max((4.0 / ad).powf(e))
}

fn check_degree(f: &Poly<C64>) -> Result<usize> {
    match f.degree() {
        Some(d) if d >= 2 => {
            if f.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                Ok(d)
            } else {
                Err(Error::InvalidInput("non-finite coefficient".into()))
            }
        }
        _ => Err(Error::InvalidInput("escape rates need deg f ≥ 2".into())),
    }
}

fn eval_ext(coeffs: &[ExtC], z: &ExtC) -> ExtC {
    coeffs.iter().rev().fold(ExtC::ZERO, |acc, c| acc.mul(z).add(c))
}

/// Green function `g_f(z)` to within `tol`.
///
/// Once `|z_n| ≥ R_f`, the value `d^{−n}(log|z_n| + log|a_d|/(d−1))` differs
/// from `g_f(z)` by at most `d^{−n}(2x_n/d)/(1 − 1/(2d))` with
/// `x_n = S/(|a_d||z_n|) ≤ 1/2`; iteration continues until this is below
/// `tol`. Orbits that never leave the disk within [`ESCAPE_CAP`] steps give
/// the value 0 with `escaped = false`.
pub fn green(f: &Poly<C64>, z: C64, tol: f64) -> Result<GreenValue> {
    let d = check_degree(f)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("Green tolerance must be positive".into()));
    }
    let df = d as f64;
    let coeffs: Vec<ExtC> = f.coeffs().iter().map(|&c| ExtC::from_c64(c)).collect();
    let ln_ad = f.coeff(d).norm().ln();
    let s: f64 = f.coeffs()[..d].iter().map(|c| c.norm()).sum();
    let ln_s = s.ln();
    let ln_r = escape_radius(f).ln();
    let offset = ln_ad / (df - 1.0);
    let mut w = ExtC::from_c64(z);
    let mut weight = 1.0f64;
    for n in 0..=ESCAPE_CAP {
        let l = w.log2_abs() * std::f64::consts::LN_2;
        if l >= ln_r {
            let x = (ln_s - ln_ad - l).exp();
            let tail = weight * (2.0 * x / df) / (1.0 - 0.5 / df);
            if tail <= tol || weight == 0.0 {
                let value = weight * (l + offset);
                // Relative rounding of the extended-exponent iterates.
                let rounding = 1e-15 * (n as f64 + 1.0) * value.abs().max(weight);
                return Ok(GreenValue { value: value.max(0.0), error: tail + rounding, escaped: true, iterations: n });
            }
        }
        if n == ESCAPE_CAP {
            break;
        }
        w = eval_ext(&coeffs, &w);
        if w.log2_abs() < -UNDERFLOW_LOG2 {
            // Indistinguishable from 0 as an input to f; keeps exponents bounded.
            w = ExtC::ZERO;
        }
        weight /= df;
    }
    let error = weight * (ln_r + offset.abs() + 1.0);
    Ok(GreenValue { value: 0.0, error, escaped: false, iterations: ESCAPE_CAP })
}

/// Green values at all critical points, `M_f` and `m_f`.
pub fn escape_rates(f: &Poly<C64>) -> Result<EscapeReport> {
    check_degree(f)?;
    let crit = complex_roots(&f.derivative())?;
    let per_critical = crit
        .into_iter()
        .map(|c| Ok((c, green(f, c, GREEN_TOL)?)))
        .collect::<Result<Vec<_>>>()?;
    let max = per_critical.iter().map(|(_, g)| g.value).fold(0.0, f64::max);
    let min = per_critical.iter().map(|(_, g)| g.value).fold(f64::INFINITY, f64::min);
    Ok(EscapeReport { max, min, per_critical })
}

/// Characteristic exponents `M_f^(p)` and `m_f^(p)`.
pub fn char_exponents(f: &Poly<C64>, p: usize) -> Result<ExponentReport> {
    check_degree(f)?;
    let spectrum = spectrum_float(f, p)?;
    let logs: Vec<f64> = spectrum.values.iter().map(|l| l.norm().ln() / p as f64).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = logs.iter().map(|&x| x.max(0.0)).fold(f64::INFINITY, f64::min);
    Ok(ExponentReport { p, max, min, spectrum })
}

/// The sharp period-2 constant: `2(d−1)/d` for even `d`, `2d/(d+1)` for odd `d`.
pub fn c_d(d: usize) -> Rational {
    let d = d as i64;
    if d % 2 == 0 {
        Rational::new(BigInt::from(2 * (d - 1)), BigInt::from(d))
    } else {
        Rational::new(BigInt::from(2 * d), BigInt::from(d + 1))
    }
}

fn c_d_f64(d: usize) -> f64 {
    crate::poly_core::field::rational_to_f64(&c_d(d))
}

/// Outcome of [`theorem_b_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremBReport {
    /// Degree.
    pub d: usize,
    /// `M_f`.
    pub escape: f64,
    /// `M_f^(1)`.
    pub m1: f64,
    /// `M_f^(2)` (computed for `d ≥ 4`).
    pub m2: Option<f64>,
    /// Margin of the inequality (of the better disjunct for `d ≥ 4`).
    pub slack: f64,
    /// Numerical error allowance.
    pub budget: f64,
    /// `slack ≥ −budget`.
    pub pass: bool,
}

/// Lower bounds on characteristic exponents in terms of `M_f`.
///
/// For `d = 2`: `M^(1) ≥ M`. For `d = 3`: `M^(1) ≥ 2M`. For `d ≥ 4`:
/// `M^(1) ≥ (d−1)/(d−2)·M` or `M^(2) ≥ C_d·M`.
pub fn theorem_b_check(f: &Poly<C64>) -> Result<TheoremBReport> {
    let d = check_degree(f)?;
    let esc = escape_rates(f)?;
    let m = esc.max;
    let m1 = char_exponents(f, 1)?.max;
    let budget = 2.0 * esc.error() + ROOT_BUDGET * m.max(1.0);
    let (m2, slack) = match d {
        2 => (None, m1 - m),
        3 => (None, m1 - 2.0 * m),
        _ => {
            let m2 = char_exponents(f, 2)?.max;
            let ratio = (d as f64 - 1.0) / (d as f64 - 2.0);
            (Some(m2), (m1 - ratio * m).max(m2 - c_d_f64(d) * m))
        }
    };
    Ok(TheoremBReport { d, escape: m, m1, m2, slack, budget, pass: slack >= -budget })
}

/// Outcome of [`appendix_a_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixAReport {
    /// Period.
    pub p: usize,
    /// `(d−1)M_f + 2 log d − M_f^(p)`.
    pub upper_slack: f64,
    /// `m_f^(p) − (d−1)m_f`, when every critical point escapes.
    pub lower_slack: Option<f64>,
    /// Numerical error allowance.
    pub budget: f64,
    /// Both margins are at least `−budget`.
    pub pass: bool,
}

/// Upper bound `M^(p) ≤ (d−1)M + 2 log d` and, when every critical point
/// escapes, lower bound `m^(p) ≥ (d−1)m`.
pub fn appendix_a_check(f: &Poly<C64>, p: usize) -> Result<AppendixAReport> {
    let d = check_degree(f)?;
    let esc = escape_rates(f)?;
    let ex = char_exponents(f, p)?;
    let k = d as f64 - 1.0;
    let budget = k * esc.error() + ROOT_BUDGET * esc.max.max(1.0);
    let upper_slack = k * esc.max + 2.0 * (d as f64).ln() - ex.max;
    let lower_slack = esc.all_escape().then_some(ex.min - k * esc.min);
    let pass = upper_slack >= -budget && lower_slack.is_none_or(|s| s >= -budget);
    Ok(AppendixAReport { p, upper_slack, lower_slack, budget, pass })
}

/// Predicted number of components of `{g_f < M_f}`: one more than the number
/// of critical points (with multiplicity) where `g_f` attains `M_f`.
pub fn component_count(f: &Poly<C64>) -> Result<usize> {
    let esc = escape_rates(f)?;
    if !esc.per_critical.iter().any(|(_, g)| g.escaped) {
        return Err(Error::InvalidInput("no critical point escapes: M_f = 0".into()));
    }
    let tol = ATTAIN_TOL * esc.max.max(1.0);
    Ok(1 + esc.per_critical.iter().filter(|(_, g)| (g.value - esc.max).abs() <= tol).count())
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

fn kind1_split(d: usize) -> (usize, usize) {
    if d.is_multiple_of(2) {
        (d / 2, d / 2)
    } else {
        ((d - 1) / 2, d.div_ceil(2))
    }
}

fn check_family(kind: u8, d: usize) -> Result<()> {
    if !(kind == 1 || kind == 2) {
        return Err(Error::InvalidInput(format!("family kind must be 1 or 2, got {kind}")));
    }
    if d < 4 {
        return Err(Error::InvalidInput(format!("sharp families need d ≥ 4, got {d}")));
    }
    Ok(())
}

/// `ω_t = (d_0/d)t + ((−1)^{d_1}(d−1)!/((d_0−1)!(d_1−1)!)) t^{2−d}` of the
/// first family.
pub fn kind1_omega<F: Field>(d: usize, t: &F) -> Result<F> {
    let (d0, d1) = kind1_split(d);
    let sign = if d1 % 2 == 0 { 1 } else { -1 };
    let coef = Rational::new(BigInt::from(sign) * factorial(d - 1), factorial(d0 - 1) * factorial(d1 - 1));
    let lin = F::from_rational(&Rational::new(BigInt::from(d0), BigInt::from(d))).mul(t);
    Ok(lin.add(&F::from_rational(&coef).mul(&t.inv()?.powu(d as u64 - 2))))
}

/// Critical points `c` of a family member, which is exactly `f_c`.
///
/// Kind 1: `d_0 − 1` zeros, `d_1 − 1` copies of `t`, then `ω_t`.
/// Kind 2: `0`, `d − 3` copies of `t`, then `2t/d`.
pub fn sharp_critical_points<F: Field>(kind: u8, d: usize, t: &F) -> Result<Vec<F>> {
    check_family(kind, d)?;
    if t.is_zero() {
        return Err(Error::InvalidInput("family parameter t must be nonzero".into()));
    }
    let mut c = Vec::with_capacity(d - 1);
    if kind == 1 {
        let (d0, d1) = kind1_split(d);
        c.extend(std::iter::repeat_n(F::zero(), d0 - 1));
        c.extend(std::iter::repeat_n(t.clone(), d1 - 1));
        c.push(kind1_omega(d, t)?);
    } else {
        c.push(F::zero());
        c.extend(std::iter::repeat_n(t.clone(), d - 3));
        c.push(F::from_rational(&Rational::new(BigInt::from(2), BigInt::from(d))).mul(t));
    }
    Ok(c)
}

/// Member `f_t` of a sharp family.
///
/// Kind 1: `Σ_{j=0}^{d_1−1} b_j z^{d_0+j}(z − t)^{d_1−1−j}(d_0 z − (d_0+1+j)ω_t)`
/// with `b_j = (−1)^j (d_0−1)!(d_1−1)!/((d_0+1+j)!(d_1−1−j)!)`, where
/// `(d_0, d_1) = (d/2, d/2)` for even `d` and `((d−1)/2, (d+1)/2)` for odd `d`.
/// Kind 2: `(1/d) z^2 (z − t)^{d−2}`.
pub fn sharp_family<F: Field>(kind: u8, d: usize, t: &F) -> Result<Poly<F>> {
    check_family(kind, d)?;
    if t.is_zero() {
        return Err(Error::InvalidInput("family parameter t must be nonzero".into()));
    }
    let z_minus_t = Poly::new(vec![t.neg(), F::one()]);
    if kind == 2 {
        let inv_d = F::from_rational(&Rational::new(BigInt::from(1), BigInt::from(d)));
        return Ok(Poly::monomial(inv_d, 2).mul(&z_minus_t.pow(d as u32 - 2)));
    }
    let (d0, d1) = kind1_split(d);
    let omega = kind1_omega(d, t)?;
    let mut f = Poly::zero();
    for j in 0..d1 {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let b = Rational::new(
            BigInt::from(sign) * factorial(d0 - 1) * factorial(d1 - 1),
            factorial(d0 + 1 + j) * factorial(d1 - 1 - j),
        );
        let last = Poly::new(vec![F::from_i64((d0 + 1 + j) as i64).mul(&omega).neg(), F::from_i64(d0 as i64)]);
        let term = Poly::monomial(F::from_rational(&b), d0 + j)
            .mul(&z_minus_t.pow((d1 - 1 - j) as u32))
            .mul(&last);
        f = f.add(&term);
    }
    Ok(f)
}

/// Which exponent a slope fit tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Maximal escape rate `M`.
    Escape,
    /// `M^(1)`.
    Period1,
    /// `M^(2)`.
    Period2,
}

/// `(M, M^(1), M^(2))` of one family member.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySample {
    /// Parameter.
    pub t: Rational,
    /// `M_{f_t}`.
    pub escape: f64,
    /// `M_{f_t}^(1)`.
    pub m1: f64,
    /// `M_{f_t}^(2)`.
    pub m2: f64,
}

impl FamilySample {
    /// The requested quantity.
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Escape => self.escape,
            Quantity::Period1 => self.m1,
            Quantity::Period2 => self.m2,
        }
    }
}

/// Evaluate `(M, M^(1), M^(2))` at one rational parameter value.
///
/// Multipliers come from the exact `χ^(p)`, so the superattracting points of
/// the family cost no precision. `M` is the float Green function at the exact
/// critical points.
pub fn family_sample(kind: u8, d: usize, t: &Rational) -> Result<FamilySample> {
    let f = sharp_family::<Rational>(kind, d, t)?;
    let ff = to_float_poly(&f);
    let mut escape = 0.0f64;
    for c in sharp_critical_points::<Rational>(kind, d, t)? {
        let c = Complex64::new(rational_to_f64(&c), 0.0);
        escape = escape.max(green(&ff, c, GREEN_TOL)?.value);
    }
    let exponent = |p: usize| -> Result<f64> {
        let spec = spectrum_exact(&f, p)?;
        Ok(spec.values.iter().map(|l| l.norm().ln() / p as f64).fold(f64::NEG_INFINITY, f64::max))
    };
    Ok(FamilySample { t: t.clone(), escape, m1: exponent(1)?, m2: exponent(2)? })
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("a slope needs at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("grid needs at least two distinct |t|".into()));
    }
    Ok(sxy / sxx)
}

/// Family samples over a grid (evaluated in parallel, returned in grid order)
/// and the fitted slopes of `(M, M^(1), M^(2))` against `log|t|`.
///
/// The grid point of smallest `|t|` is excluded from the fit to suppress the
/// bounded offset.
pub fn sharp_family_table(kind: u8, d: usize, grid: &[Rational]) -> Result<(Vec<FamilySample>, [f64; 3])> {
    check_family(kind, d)?;
    if grid.len() < 3 {
        return Err(Error::InvalidInput("slope fitting needs at least three grid points".into()));
    }
    let samples = grid
        .par_iter()
        .map(|t| family_sample(kind, d, t))
        .collect::<Result<Vec<_>>>()?;
    let log_abs: Vec<f64> = grid.iter().map(|t| rational_to_f64(t).abs().ln()).collect();
    let smallest = (0..grid.len())
        .min_by(|&a, &b| log_abs[a].total_cmp(&log_abs[b]))
        .expect("nonempty grid");
    let slope = |q: Quantity| {
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != smallest)
            .map(|(i, s)| (log_abs[i], s.get(q)))
            .collect();
        least_squares_slope(&pts)
    };
    let slopes = [slope(Quantity::Escape)?, slope(Quantity::Period1)?, slope(Quantity::Period2)?];
    Ok((samples, slopes))
}

/// Fitted slope of one quantity over a grid.
pub fn slope_fit(kind: u8, d: usize, quantity: Quantity, grid: &[Rational]) -> Result<f64> {
    let (_, slopes) = sharp_family_table(kind, d, grid)?;
    Ok(match quantity {
        Quantity::Escape => slopes[0],
        Quantity::Period1 => slopes[1],
        Quantity::Period2 => slopes[2],
    })
}

/// Geometric grid `t = 10^k` for `k = lo..=hi`.
pub fn default_t_grid(lo: i32, hi: i32) -> Vec<Rational> {
    (lo..=hi)
        .map(|k| {
            let p = BigInt::from(10).pow(k.unsigned_abs());
            if k >= 0 { Rational::from_integer(p) } else { Rational::new(BigInt::from(1), p) }
        })
        .collect()
}

/// Deterministic generator for sample `index` of a run seeded by `seed`.
///
/// Each index gets its own ChaCha stream, so samples are independent of
/// evaluation order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A random critically marked polynomial `f_c` of degree `d` whose critical
/// vector has sup norm `‖c‖` log-uniform in `[lo, hi]`.
///
/// Critical points are uniform in the unit disk, rescaled so the largest has
/// modulus `‖c‖`.
pub fn random_ingram(d: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Result<(Vec<C64>, Poly<C64>)> {
    if d < 2 {
        return Err(Error::InvalidInput("degree must be at least 2".into()));
    }
    let norm = (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp();
    let mut c: Vec<C64> = (0..d - 1)
        .map(|_| {
            let r = rng.random::<f64>().sqrt();
            Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
        })
        .collect();
    let big = c.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for x in &mut c {
        *x *= norm / big;
    }
    let f = ingram_poly(&c)?;
    Ok((c, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::rat;
    use proptest::prelude::*;

    fn cp(v: &[f64]) -> Poly<C64> {
        Poly::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    fn c(re: f64, im: f64) -> C64 {
        Complex64::new(re, im)
    }

    #[test]
    fn green_of_power_maps() {
        for d in 2..=5 {
            let mut v = vec![0.0; d + 1];
            v[d] = 1.0;
            let f = cp(&v);
            for z in [c(3.0, 4.0), c(0.5, 0.0), c(1e3, -2e3)] {
                let g = green(&f, z, 1e-13).unwrap();
                let want = z.norm().ln().max(0.0);
                assert!((g.value - want).abs() <= g.error + 1e-12, "d={d} z={z}");
            }
        }
        let g = green(&cp(&[-1.0, 0.0, 1.0]), c(0.0, 0.0), 1e-12).unwrap();
        assert_eq!((g.value, g.escaped), (0.0, false));
    }

    #[test]
    fn escape_radius_guarantees_growth() {
        let f = ingram_poly(&[c(400.0, 0.0), c(-30.0, 80.0), c(1.0, 1.0)]).unwrap();
        let r = escape_radius(&f);
        let ad = f.coeff(3).norm();
        for k in 0..64 {
            let w = Complex64::from_polar(r * (1.0 + k as f64 / 8.0), k as f64);
            let fw = f.eval(&w).norm();
            assert!(fw >= 2.0 * w.norm() && fw >= 0.5 * ad * w.norm().powi(3));
        }
    }

    #[test]
    fn escape_rate_examples() {
        let z3 = cp(&[0.0, 0.0, 0.0, 1.0]);
        let e = escape_rates(&z3).unwrap();
        assert_eq!((e.max, e.min), (0.0, 0.0));
        // z^2 + c with |c| large: M = g(0) = g(c)/2 ≈ log|c|/2.
        let f = cp(&[1e6, 0.0, 1.0]);
        let e = escape_rates(&f).unwrap();
        let direct = green(&f, c(1e6, 0.0), 1e-14).unwrap().value / 2.0;
        assert!((e.max - direct).abs() < 1e-10);
        assert!((e.max - 0.5 * 1e6f64.ln()).abs() < 1e-6);
        // f_c with large c: M within log‖c‖ + O(1).
        let f = ingram_poly(&[c(1e3, 0.0), c(0.0, 1e3)]).unwrap();
        let e = escape_rates(&f).unwrap();
        assert!(e.max <= 1e3f64.ln() + 3.0 && e.max >= 1e3f64.ln() - 3.0, "{}", e.max);
    }

    #[test]
    fn exponent_examples() {
        for d in 2..=5 {
            let mut v = vec![0.0; d + 1];
            v[d] = 1.0;
            let f = cp(&v);
            let lnd = (d as f64).ln();
            assert!((char_exponents(&f, 1).unwrap().max - lnd).abs() < 1e-10);
            assert!((char_exponents(&f, 2).unwrap().max - lnd).abs() < 1e-10);
        }
        let ex = char_exponents(&cp(&[-1.0, 0.0, 1.0]), 2).unwrap();
        assert_eq!(ex.min, 0.0);
    }

    #[test]
    fn constants_and_power_map_checks() {
        assert_eq!(c_d(4), rat(3, 2));
        assert_eq!(c_d(5), rat(5, 3));
        for d in 2..=6 {
            let mut v = vec![0.0; d + 1];
            v[d] = 1.0;
            assert!(theorem_b_check(&cp(&v)).unwrap().pass);
            let a = appendix_a_check(&cp(&v), 1).unwrap();
            assert!(a.pass && a.lower_slack.is_none());
        }
        let a = appendix_a_check(&cp(&[10.0, 0.0, 1.0]), 1).unwrap();
        assert!(a.pass && a.lower_slack.is_some());
    }

    #[test]
    fn component_count_examples() {
        assert_eq!(component_count(&cp(&[10.0, 0.0, 1.0])).unwrap(), 2);
        let t = 1e4;
        assert_eq!(component_count(&ingram_poly(&[c(t, 0.0), c(t, 0.0)]).unwrap()).unwrap(), 3);
        assert_eq!(component_count(&ingram_poly(&[c(t, 0.0), c(1.0, 0.0)]).unwrap()).unwrap(), 2);
        assert!(component_count(&cp(&[0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn sharp_family_structure() {
        let f = sharp_family(2, 4, &rat(1, 1)).unwrap();
        let z2 = Poly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        let zm1 = Poly::new(vec![rat(-1, 1), rat(1, 1)]);
        assert_eq!(f, z2.mul(&zm1.pow(2)).scale(&rat(1, 4)));
        for d in 4..=7 {
            for t in [rat(3, 1), rat(-5, 2)] {
                for kind in [1u8, 2] {
                    let f = sharp_family(kind, d, &t).unwrap();
                    let cs = sharp_critical_points(kind, d, &t).unwrap();
                    assert_eq!(f, ingram_poly(&cs).unwrap(), "kind {kind} d {d}");
                    assert_eq!(f.eval(&rat(0, 1)), rat(0, 1));
                    let want_t = if kind == 1 { t.clone() } else { rat(0, 1) };
                    assert_eq!(f.eval(&t), want_t);
                }
                let f2 = sharp_family(2, d, &t).unwrap();
                let zt = Poly::new(vec![-t.clone(), rat(1, 1)]);
                let want = Poly::new(vec![rat(0, 1), rat(1, 1)])
                    .mul(&zt.pow(d as u32 - 3))
                    .mul(&Poly::new(vec![-t.clone() * rat(2, d as i64), rat(1, 1)]));
                assert_eq!(f2.derivative(), want);
            }
        }
        assert!(sharp_family(1, 3, &rat(1, 1)).is_err());
        assert!(sharp_family(3, 4, &rat(1, 1)).is_err());
    }

    #[test]
    fn slope_fit_examples() {
        let grid = default_t_grid(2, 6);
        let (_, s) = sharp_family_table(2, 4, &grid).unwrap();
        assert!((s[0] - 1.0).abs() < 0.05, "{s:?}");
        let (_, s) = sharp_family_table(1, 4, &grid).unwrap();
        assert!(s[1].abs() < 0.05, "{s:?}");
        assert!((s[2] - 1.5).abs() < 0.05 * 1.5, "{s:?}");
    }

    #[test]
    fn least_squares_recovers_lines() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.5 * k as f64 - 1.0)).collect();
        assert!((least_squares_slope(&pts).unwrap() - 2.5).abs() < 1e-12);
        assert!(least_squares_slope(&pts[..1]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn green_functional_equation(co in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..=6),
                                     lead in 0.2f64..3.0, z in (-4.0f64..4.0, -4.0f64..4.0)) {
            let mut v: Vec<C64> = co.iter().map(|&(x, y)| c(x, y)).collect();
            v.push(c(lead, 0.0));
            let f = Poly::new(v);
            let d = f.deg() as f64;
            let z = c(z.0, z.1);
            let g0 = green(&f, z, 1e-12).unwrap();
            let g1 = green(&f, f.eval(&z), 1e-12).unwrap();
            if g0.escaped {
                prop_assert!((g1.value - d * g0.value).abs() <= g1.error + d * g0.error + 1e-9 * g1.value.max(1.0));
            }
        }

        #[test]
        fn escape_rates_are_conjugation_invariant(cs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..=3),
                                                  alpha in (0.5f64..2.0, -1.0f64..1.0), beta in (-3.0f64..3.0, -3.0f64..3.0)) {
            let cv: Vec<C64> = cs.iter().map(|&(x, y)| c(x, y)).collect();
            let f = ingram_poly(&cv).unwrap();
            let g = crate::moduli::conjugate(&f, c(alpha.0, alpha.1), c(beta.0, beta.1)).unwrap();
            let (a, b) = (escape_rates(&f).unwrap(), escape_rates(&g).unwrap());
            let tol = 1e-6 * a.max.max(1.0);
            prop_assert!((a.max - b.max).abs() <= tol && (a.min - b.min).abs() <= tol);
        }
    }
}
