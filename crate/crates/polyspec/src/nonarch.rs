//! Exact non-Archimedean engine over truncated Puiseux series in `t`.
//!
//! A [`PuiseuxSeries`] is a finite list of exact terms `c·t^e` (rational `c`,
//! rational `e`) together with an optional floor `F`: the true value differs
//! from the listed terms only in exponents strictly below `F`. Its absolute
//! value is `|a| = exp(leading exponent)`, so `|t| = e` and `log|a|` is the
//! leading exponent. Arithmetic propagates floors exactly and additionally
//! drops terms more than `window` exponent units below the leading term. An
//! element whose listed terms are all gone but whose floor is set is
//! *uncertified*: it is known to be small but its leading term is not, and
//! any operation that needs that term fails with
//! [`Error::WindowExhausted`].
//!
//! Finite Laurent sums (no floor) are exact values and are never truncated;
//! the window only bounds genuinely infinite expansions such as `1/(t − 1)`.
//!
//! On top of the series field sit Newton polygons of polynomials with series
//! coefficients, the exact maximal escape rate of an Ingram-form polynomial,
//! the exact characteristic exponents `M^(p)` for `p ∈ {1, 2}` and the exact
//! verification of the two sharp families. The multiplier polynomial over the
//! series field is available both by fraction-free elimination and, much
//! faster, by exact evaluation and interpolation in `t`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::escape::{c_d, sharp_critical_points, sharp_family};
use crate::poly_core::field::{format_rational, parse_rational, Field, Rational, Ring};
use crate::poly_core::poly::Poly;
use crate::poly_core::linalg::{det_bareiss, multiplication_matrix};
use crate::spectra::{cycle_counts, dynatomic};

/// Exponent of `t` (a rational number with small denominator).
pub type Exponent = Ratio<i64>;

/// Default truncation window in exponent units.
pub const DEFAULT_WINDOW: i64 = 40;
/// Largest exponent denominator accepted on input.
pub const RAMIFICATION_CAP: i64 = 12;

/// Truncated Puiseux series in `t` with rational coefficients.
///
/// Equality compares values (terms and floor), not the truncation window.
#[derive(Clone, Debug)]
pub struct PuiseuxSeries {
    /// Exact terms, strictly decreasing exponents, nonzero coefficients, all
    /// exponents at or above `floor`.
    terms: Vec<(Exponent, Rational)>,
    /// Exponents strictly below the floor are unknown; `None` means exact.
    floor: Option<Exponent>,
    /// Relative truncation window applied after each operation.
    window: Exponent,
}

impl PartialEq for PuiseuxSeries {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.floor == other.floor
    }
}

fn exp_int(n: i64) -> Exponent {
    Ratio::from_integer(n)
}

fn max_opt(a: Option<Exponent>, b: Option<Exponent>) -> Option<Exponent> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PuiseuxSeries {
    /// The exact zero.
    pub fn zero() -> Self {
        PuiseuxSeries { terms: Vec::new(), floor: None, window: exp_int(0) }
    }

    /// An exact rational constant.
    pub fn constant(q: Rational) -> Self {
        Self::monomial(q, exp_int(0))
    }

    /// The exact monomial `c·t^e`.
    pub fn monomial(c: Rational, e: Exponent) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        PuiseuxSeries { terms, floor: None, window: exp_int(0) }
    }

    /// The parameter `t` with the given window.
    pub fn t(window: i64) -> Self {
        Self::monomial(Rational::one(), exp_int(1)).with_window(exp_int(window))
    }

    /// Build a series from terms in any order.
    ///
    /// Repeated exponents are summed. Exponent denominators above
    /// [`RAMIFICATION_CAP`] and non-positive windows are rejected.
    pub fn from_terms(terms: Vec<(Exponent, Rational)>, floor: Option<Exponent>, window: Exponent) -> Result<Self> {
        if window <= exp_int(0) {
            return Err(Error::InvalidInput("series window must be positive".into()));
        }
        for e in terms.iter().map(|(e, _)| e).chain(floor.iter()) {
            if *e.denom() > RAMIFICATION_CAP {
                return Err(Error::InvalidInput(format!(
                    "exponent {e} has denominator above the ramification cap {RAMIFICATION_CAP}"
                )));
            }
        }
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        Ok(Self::from_map(map, floor, window))
    }

    fn from_map(map: BTreeMap<Exponent, Rational>, floor: Option<Exponent>, window: Exponent) -> Self {
        let terms = map
            .into_iter()
            .rev()
            .filter(|(e, c)| !c.is_zero() && floor.is_none_or(|f| *e >= f))
            .collect();
        let mut s = PuiseuxSeries { terms, floor, window };
        s.apply_window();
        s
    }

    /// Drop terms of an inexact value more than `window` below the leading
    /// exponent. Exact values (finite Laurent sums) are never truncated.
    fn apply_window(&mut self) {
        let (Some((lead, _)), Some(fl)) = (self.terms.first(), self.floor) else { return };
        if self.window <= exp_int(0) {
            return;
        }
        let f = fl.max(*lead - self.window);
        self.floor = Some(f);
        self.terms.retain(|(e, _)| *e >= f);
    }

    /// The same value with a different truncation window.
    pub fn with_window(&self, window: Exponent) -> Self {
        let mut s = self.clone();
        s.window = window;
        s.apply_window();
        s
    }

    /// Exact terms, leading first.
    pub fn terms(&self) -> &[(Exponent, Rational)] {
        &self.terms
    }

    /// Precision floor (`None` for an exact value).
    pub fn floor(&self) -> Option<Exponent> {
        self.floor
    }

    /// Truncation window.
    pub fn window(&self) -> Exponent {
        self.window
    }

    /// Least common denominator of the exponents.
    pub fn ramification(&self) -> i64 {
        self.terms
            .iter()
            .map(|(e, _)| *e.denom())
            .chain(self.floor.map(|f| *f.denom()))
            .fold(1, |a, b| a.lcm(&b))
    }

    /// True for the exact zero.
    pub fn is_known_zero(&self) -> bool {
        self.terms.is_empty() && self.floor.is_none()
    }

    /// True when the leading term is known (or the value is exactly zero).
    pub fn is_certified(&self) -> bool {
        !self.terms.is_empty() || self.floor.is_none()
    }

    /// Leading term `(exponent, coefficient)`, if certified and nonzero.
    pub fn leading(&self) -> Option<(Exponent, &Rational)> {
        self.terms.first().map(|(e, c)| (*e, c))
    }

    /// `log|a|`, the leading exponent; `None` for exact zero.
    pub fn valuation(&self) -> Result<Option<Exponent>> {
        match (self.terms.first(), self.floor) {
            (Some((e, _)), _) => Ok(Some(*e)),
            (None, None) => Ok(None),
            (None, Some(f)) => Err(Error::WindowExhausted(format!("leading term below t^{f} is not certified"))),
        }
    }

    /// Exclusive upper bound on the leading exponent (`None` for exact zero).
    fn magnitude_bound(&self) -> Option<Exponent> {
        self.terms.first().map(|(e, _)| *e).or(self.floor)
    }

    fn combined_window(&self, rhs: &Self) -> Exponent {
        self.window.max(rhs.window)
    }

    fn series_add(&self, rhs: &Self) -> Self {
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            *map.entry(*e).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(map, max_opt(self.floor, rhs.floor), self.combined_window(rhs))
    }

    fn series_neg(&self) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            floor: self.floor,
            window: self.window,
        }
    }

    fn series_mul(&self, rhs: &Self) -> Self {
        let window = self.combined_window(rhs);
        if self.is_known_zero() || rhs.is_known_zero() {
            return PuiseuxSeries { window, ..Self::zero() };
        }
        let va = self.magnitude_bound().expect("nonzero");
        let vb = rhs.magnitude_bound().expect("nonzero");
        // Error terms: A·E_b, B·E_a (and E_a·E_b, dominated by both).
        let floor = max_opt(rhs.floor.map(|f| va + f), self.floor.map(|f| vb + f));
        let cut = match (floor, self.leading(), rhs.leading()) {
            (Some(_), Some((ea, _)), Some((eb, _))) if window > exp_int(0) => max_opt(floor, Some(ea + eb - window)),
            _ => floor,
        };
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        let mut skipped = false;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = *ea + *eb;
                if cut.is_some_and(|c| e < c) {
                    // Terms of rhs are decreasing, so the rest fall below too.
                    skipped = true;
                    break;
                }
                *map.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_map(map, if skipped { max_opt(floor, cut) } else { floor }, window)
    }

    fn series_div(&self, rhs: &Self) -> Result<Self> {
        let window = self.combined_window(rhs);
        let Some((vb, cb)) = rhs.leading() else {
            return Err(if rhs.is_known_zero() {
                Error::DivisionByZero
            } else {
                Error::WindowExhausted("division by an uncertified series".into())
            });
        };
        if self.is_known_zero() {
            return Ok(PuiseuxSeries { window, ..Self::zero() });
        }
        if self.floor.is_none() && rhs.floor.is_none() {
            if let Some(q) = self.laurent_quotient(rhs) {
                return Ok(PuiseuxSeries { window, ..q });
            }
        }
        let va = self.magnitude_bound().expect("nonzero");
        // a/b = A/B + O(E_a/B) + O(A·E_b/B²).
        let floor = max_opt(self.floor.map(|f| f - vb), rhs.floor.map(|f| va - vb - vb + f));
        // Quotients of constants carry no window; they still need a cut.
        let eff = if window > exp_int(0) { window } else { exp_int(DEFAULT_WINDOW) };
        let cut = max_opt(floor, Some(va - vb - eff)).expect("cut is set");
        let cb_inv = cb.recip();
        let mut rem: BTreeMap<Exponent, Rational> = self.terms.iter().cloned().collect();
        let mut quotient: BTreeMap<Exponent, Rational> = BTreeMap::new();
        let mut exhausted = false;
        while let Some((er, cr)) = rem.pop_last() {
            let e = er - vb;
            if e < cut {
                exhausted = true;
                break;
            }
            let q = &cr * &cb_inv;
            for (eb, cbj) in rhs.terms.iter().skip(1) {
                let er2 = e + *eb;
                if er2 - vb < cut {
                    exhausted = true;
                    break;
                }
                *rem.entry(er2).or_insert_with(Rational::zero) -= &q * cbj;
            }
            rem.retain(|_, v| !v.is_zero());
            quotient.insert(e, q);
        }
        // A nonterminating quotient of exact operands is truncated at the cut.
        let floor = if exhausted || floor.is_some() { Some(cut) } else { None };
        Ok(Self::from_map(quotient, floor, window))
    }
}

impl PuiseuxSeries {
    /// Exact quotient of two finite Laurent sums, when it is one.
    fn laurent_quotient(&self, rhs: &Self) -> Option<Self> {
        let (vb, cb) = rhs.leading()?;
        let low_a = self.terms.last()?.0;
        let low_b = rhs.terms.last()?.0;
        let lowest = low_a - low_b;
        let cb_inv = cb.recip();
        let mut rem: BTreeMap<Exponent, Rational> = self.terms.iter().cloned().collect();
        let mut quotient: BTreeMap<Exponent, Rational> = BTreeMap::new();
        while let Some((er, cr)) = rem.pop_last() {
            let e = er - vb;
            if e < lowest {
                return None;
            }
            let q = &cr * &cb_inv;
            for (eb, cbj) in rhs.terms.iter().skip(1) {
                *rem.entry(e + *eb).or_insert_with(Rational::zero) -= &q * cbj;
            }
            rem.retain(|_, v| !v.is_zero());
            quotient.insert(e, q);
        }
        Some(Self::from_map(quotient, None, exp_int(0)))
    }
}

impl Ring for PuiseuxSeries {
    fn zero() -> Self {
        PuiseuxSeries::zero()
    }
    fn one() -> Self {
        PuiseuxSeries::constant(Rational::one())
    }
    fn from_i64(n: i64) -> Self {
        PuiseuxSeries::constant(Rational::from_integer(BigInt::from(n)))
    }
    fn is_zero(&self) -> bool {
        self.is_known_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.series_add(rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.series_add(&rhs.series_neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.series_mul(rhs)
    }
    fn neg(&self) -> Self {
        self.series_neg()
    }
    fn exact_div(&self, rhs: &Self) -> Result<Self> {
        self.series_div(rhs)
    }
    /// Ultrametric pivoting: the largest absolute value wins, uncertified
    /// elements only as a last resort (their inversion then fails).
    fn pivot_weight(&self) -> Option<f64> {
        if self.is_known_zero() {
            return None;
        }
        Some(match self.leading() {
            Some((e, _)) => e.to_f64().unwrap_or(f64::NEG_INFINITY),
            None => f64::NEG_INFINITY,
        })
    }
}

impl Field for PuiseuxSeries {
    const EXACT: bool = true;
    fn inv(&self) -> Result<Self> {
        Self::one().series_div(self)
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        self.series_div(rhs)
    }
    fn from_rational(q: &Rational) -> Self {
        PuiseuxSeries::constant(q.clone())
    }
    /// Uncertified elements are consistent with zero and count as negligible.
    fn is_negligible(&self, _abs_tol: f64) -> bool {
        self.terms.is_empty()
    }
    fn magnitude(&self) -> f64 {
        self.leading().map_or(0.0, |(e, _)| e.to_f64().unwrap_or(0.0).exp())
    }
}

impl fmt::Display for PuiseuxSeries {
    /// Terms leading first; a trailing `O(t^F)` marks the floor (unknown
    /// exponents are strictly below `F`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let c = format_rational(c);
                if *e == exp_int(0) {
                    c
                } else {
                    format!("{c}*t^{e}")
                }
            })
            .collect();
        if let Some(fl) = self.floor {
            parts.push(format!("O(t^{fl})"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Parse an exponent `"p/q"` (or an integer).
pub fn parse_exponent(v: &Value) -> Result<Exponent> {
    let q = match v {
        Value::String(s) => parse_rational(s)?,
        Value::Number(n) if n.is_i64() => Rational::from_integer(BigInt::from(n.as_i64().expect("checked"))),
        _ => return Err(Error::Parse(format!("exponent must be \"p/q\" or an integer, got {v}"))),
    };
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Ratio::new(n, d)),
        _ => Err(Error::Parse(format!("exponent {v} out of range"))),
    }
}

/// Parse a series literal: a list of `[exponent, coefficient]` pairs, both as
/// `"p/q"` strings or integers. The value is exact with the default window.
pub fn series_from_json(v: &Value) -> Result<PuiseuxSeries> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("series must be a list of [exponent, coefficient] pairs".into()))?;
    let terms = arr
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([e, c]) => Ok((parse_exponent(e)?, crate::poly_core::json::rational_from_json(c)?)),
            _ => Err(Error::Parse(format!("series term must be [exponent, coefficient], got {pair}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    PuiseuxSeries::from_terms(terms, None, exp_int(DEFAULT_WINDOW))
}

/// JSON form of a series: `{"terms": [[e, c], ...], "floor": e | null}`.
pub fn series_to_json(s: &PuiseuxSeries) -> Value {
    let terms: Vec<Value> = s.terms.iter().map(|(e, c)| json!([e.to_string(), format_rational(c)])).collect();
    json!({ "terms": terms, "floor": s.floor.map(|f| f.to_string()) })
}

/// Parse a polynomial with series coefficients (low degree first).
pub fn series_poly_from_json(v: &Value) -> Result<Poly<PuiseuxSeries>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("series polynomial must be a list of series".into()))?;
    Ok(Poly::new(arr.iter().map(series_from_json).collect::<Result<Vec<_>>>()?))
}

/// Newton polygon of a polynomial in `λ` with series coefficients.
///
/// Each segment `(s, n)` stands for exactly `n` roots with `log|λ| = s`;
/// segments are listed by strictly decreasing `s`. Roots `λ = 0` are counted
/// separately.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    /// `(log|λ|, number of roots)`, decreasing in `log|λ|`.
    pub segments: Vec<(Exponent, usize)>,
    /// Multiplicity of the root `λ = 0`.
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Total number of roots.
    pub fn degree(&self) -> usize {
        self.zero_roots + self.segments.iter().map(|s| s.1).sum::<usize>()
    }

    /// `log|λ|` of the nonzero roots with multiplicity, decreasing.
    pub fn root_valuations(&self) -> Vec<Exponent> {
        self.segments.iter().flat_map(|&(s, n)| std::iter::repeat_n(s, n)).collect()
    }
}

/// Newton polygon from the upper convex hull of `(i, log|c_i|)`.
///
/// The leading coefficient must be certified. An uncertified coefficient is
/// accepted when its floor lies on or below the hull, so that it cannot
/// change it.
pub fn newton_polygon(p: &Poly<PuiseuxSeries>) -> Result<NewtonPolygon> {
    let n = p.degree().ok_or_else(|| Error::InvalidInput("Newton polygon of the zero polynomial".into()))?;
    let coeffs = p.coeffs();
    if coeffs[n].leading().is_none() {
        return Err(Error::WindowExhausted("leading coefficient is not certified".into()));
    }
    let zero_roots = coeffs.iter().take_while(|c| c.is_known_zero()).count();
    let mut points: Vec<(i64, Exponent)> = Vec::new();
    for (i, c) in coeffs.iter().enumerate().skip(zero_roots) {
        if let Some((e, _)) = c.leading() {
            points.push((i as i64, e));
        }
    }
    if points[0].0 as usize != zero_roots {
        return Err(Error::WindowExhausted(format!("coefficient of λ^{zero_roots} is not certified")));
    }
    // Upper hull, left to right.
    let mut hull: Vec<(i64, Exponent)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop the middle point when it lies on or below the chord.
            let lhs = (y2 - y1) * exp_int(pt.0 - x1);
            let rhs = (pt.1 - y1) * exp_int(x2 - x1);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let hull_at = |i: i64| -> Exponent {
        let k = hull.windows(2).position(|w| w[0].0 <= i && i <= w[1].0).expect("inside hull");
        let ((x1, y1), (x2, y2)) = (hull[k], hull[k + 1]);
        y1 + (y2 - y1) * exp_int(i - x1) / exp_int(x2 - x1)
    };
    for (i, c) in coeffs.iter().enumerate().skip(zero_roots) {
        if let (None, Some(fl)) = (c.leading(), c.floor()) {
            if fl > hull_at(i as i64) {
                return Err(Error::WindowExhausted(format!("coefficient of λ^{i} may lie on the hull")));
            }
        }
    }
    let mut segments: Vec<(Exponent, usize)> = hull
        .windows(2)
        .map(|w| {
            let len = (w[1].0 - w[0].0) as usize;
            (-(w[1].1 - w[0].1) / exp_int(len as i64), len)
        })
        .collect();
    segments.reverse();
    Ok(NewtonPolygon { segments, zero_roots })
}

/// `M = log⁺‖c‖` for the Ingram-form polynomial with critical points `c`.
pub fn nonarch_escape(c: &[PuiseuxSeries], d: usize) -> Result<Exponent> {
    if d < 2 || c.len() != d - 1 {
        return Err(Error::InvalidInput(format!("expected {} critical points for d = {d}, got {}", d.saturating_sub(1), c.len())));
    }
    let mut m = exp_int(0);
    for cj in c {
        if let Some(v) = cj.valuation()? {
            m = m.max(v);
        }
    }
    Ok(m)
}

/// Characteristic exponent data for one period.
#[derive(Clone, Debug, PartialEq)]
pub struct CharExponent {
    /// Period.
    pub p: usize,
    /// `M^(p) = max (1/p) log|λ|`; `None` when every multiplier is 0.
    pub max: Option<Exponent>,
    /// `(1/p) log|λ|` over the nonzero multipliers, decreasing.
    pub slopes: Vec<Exponent>,
    /// Number of zero multipliers.
    pub zero_multipliers: usize,
    /// `χ^(p)` with exact Laurent coefficients.
    pub chi: Poly<PuiseuxSeries>,
}

/// Exact `M^(p)` and the full slope multiset for `p ∈ {1, 2}`, `d ≤ 5`.
///
/// The coefficients of `f` must be exact finite Laurent sums; `χ^(p)` then
/// comes from [`multiplier_poly_laurent`] and its Newton polygon gives the
/// exponents.
pub fn nonarch_char_exponent(f: &Poly<PuiseuxSeries>, p: usize) -> Result<CharExponent> {
    let d = f.degree().unwrap_or(0);
    if !(2..=5).contains(&d) {
        return Err(Error::InvalidInput(format!("series exponents need 2 ≤ d ≤ 5, got {d}")));
    }
    if !(p == 1 || p == 2) {
        return Err(Error::InvalidInput(format!("series exponents support p ∈ {{1, 2}}, got {p}")));
    }
    let expected = cycle_counts(d as u64, p as u64)?.n as usize;
    let chi = multiplier_poly_laurent(f, p)?;
    if chi.deg() != expected {
        return Err(Error::CheckFailed(format!("deg χ^({p}) = {} but N = {expected}", chi.deg())));
    }
    let np = newton_polygon(&chi)?;
    let scale = exp_int(p as i64);
    let slopes: Vec<Exponent> = np.root_valuations().into_iter().map(|s| s / scale).collect();
    Ok(CharExponent { p, max: slopes.first().copied(), slopes, zero_multipliers: np.zero_roots, chi })
}

/// `χ^(p)` over the series field: `det(λI − M)` by fraction-free elimination,
/// where `M` is multiplication by `(f^{∘p})′` modulo `Φ^(p)`, then a `p`-th
/// root by coefficient matching.
///
/// Exact Laurent inputs give an exact result. The cost grows quickly with
/// the size of `M`; [`multiplier_poly_laurent`] is the fast exact route.
pub fn multiplier_poly_series(f: &Poly<PuiseuxSeries>, p: usize) -> Result<Poly<PuiseuxSeries>> {
    let phi = dynatomic(f, p)?;
    let h = f.iterate(p as u32)?.derivative();
    let m = multiplication_matrix(&h, &phi)?;
    let n = m.len();
    let shifted: Vec<Vec<Poly<PuiseuxSeries>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j { PuiseuxSeries::one() } else { PuiseuxSeries::zero() };
                    Poly::new(vec![m[i][j].neg(), diag])
                })
                .collect()
        })
        .collect();
    det_bareiss(shifted)?.pth_root(p, 0.0)
}

/// Initial half-width of the exponent range assumed by
/// [`multiplier_poly_laurent`].
const INITIAL_EXPONENT_BOUND: usize = 16;
/// Largest half-width tried before giving up.
pub const MAX_EXPONENT_BOUND: usize = 2048;
/// Extra sample points used to confirm an interpolant.
const CHECK_POINTS: usize = 2;

/// Exact `χ^(p)` of a polynomial with exact Laurent coefficients, by
/// evaluation and interpolation in `t`.
///
/// With `e` the ramification and `t = s^e`, every coefficient of `χ^(p)` is a
/// Laurent polynomial in `s`. Assuming its exponents lie in `[−B, B]`,
/// `s^B·c(s)` is a polynomial of degree at most `2B`; it is interpolated from
/// the exact `χ^(p)` of `f` at `2B + 1` rational points `s` and accepted once
/// it also matches at [`CHECK_POINTS`] further points. Otherwise `B` doubles.
pub fn multiplier_poly_laurent(f: &Poly<PuiseuxSeries>, p: usize) -> Result<Poly<PuiseuxSeries>> {
    let d = f.degree().ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let e = f.coeffs().iter().map(PuiseuxSeries::ramification).fold(1, |a, b| a.lcm(&b));
    let laurent: Vec<Vec<(i64, Rational)>> = f
        .coeffs()
        .iter()
        .map(|c| {
            if c.floor().is_some() {
                return Err(Error::InvalidInput(format!("coefficient {c} is truncated; exact Laurent sums are required")));
            }
            Ok(c.terms().iter().map(|(x, q)| ((*x * exp_int(e)).to_integer(), q.clone())).collect())
        })
        .collect::<Result<_>>()?;
    let sample = |s: &Rational| -> Result<Option<Vec<Rational>>> {
        let fs = Poly::new(laurent.iter().map(|terms| eval_laurent(terms, s)).collect());
        if fs.degree() != Some(d) {
            return Ok(None);
        }
        Ok(Some(crate::spectra::multiplier_poly_exact(&fs, p)?.into_coeffs()))
    };
    let mut points = small_rationals();
    let mut samples: Vec<(Rational, Vec<Rational>)> = Vec::new();
    let mut bound = INITIAL_EXPONENT_BOUND;
    loop {
        let need = 2 * bound + 1 + CHECK_POINTS;
        while samples.len() < need {
            let batch: Vec<Rational> = points.by_ref().take(need - samples.len()).collect();
            let values = batch.par_iter().map(sample).collect::<Result<Vec<_>>>()?;
            samples.extend(batch.into_iter().zip(values).filter_map(|(s, v)| v.map(|v| (s, v))));
        }
        if let Some(chi) = interpolate_laurent(&samples[..need], bound, e)? {
            return Ok(chi);
        }
        if bound >= MAX_EXPONENT_BOUND {
            return Err(Error::DegreeOverflow(format!("χ^({p}) has t-exponents beyond ±{MAX_EXPONENT_BOUND}")));
        }
        bound *= 2;
    }
}

/// `Σ c·s^k` for integer (possibly negative) `k`.
fn eval_laurent(terms: &[(i64, Rational)], s: &Rational) -> Rational {
    terms.iter().fold(Rational::zero(), |acc, (k, c)| {
        let pw = if *k >= 0 { s.powu(*k as u64) } else { s.recip().powu(k.unsigned_abs()) };
        acc + c * pw
    })
}

/// Distinct nonzero rationals `±a/b` in order of increasing height.
fn small_rationals() -> impl Iterator<Item = Rational> {
    (1i64..).flat_map(|h| {
        let mut v: Vec<Rational> = Vec::new();
        for a in 1..=h {
            for b in 1..=h {
                if a.max(b) == h && a.gcd(&b) == 1 {
                    let q = Rational::new(BigInt::from(a), BigInt::from(b));
                    v.push(-q.clone());
                    v.push(q);
                }
            }
        }
        v
    })
}

/// Interpolate every coefficient of `χ` from `2B + 1` samples and confirm on
/// the remaining ones; `None` when the confirmation fails.
fn interpolate_laurent(samples: &[(Rational, Vec<Rational>)], bound: usize, e: i64) -> Result<Option<Poly<PuiseuxSeries>>> {
    let n = 2 * bound + 1;
    let len = samples[0].1.len();
    if samples.iter().any(|(_, v)| v.len() != len) {
        return Ok(None);
    }
    let xs: Vec<Rational> = samples[..n].iter().map(|(s, _)| s.clone()).collect();
    let scaled = |s: &Rational, c: &Rational| c * s.powu(bound as u64);
    let mut coeffs: Vec<PuiseuxSeries> = Vec::with_capacity(len);
    for i in 0..len {
        let ys: Vec<Rational> = samples[..n].iter().map(|(s, v)| scaled(s, &v[i])).collect();
        let newton = divided_differences(&xs, ys);
        for (s, v) in &samples[n..] {
            if newton_eval(&xs, &newton, s) != scaled(s, &v[i]) {
                return Ok(None);
            }
        }
        let mono = newton_to_monomial(&xs, &newton);
        let terms = mono
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (Ratio::new(k as i64 - bound as i64, e), c))
            .collect();
        coeffs.push(PuiseuxSeries::from_terms(terms, None, exp_int(DEFAULT_WINDOW))?);
    }
    Ok(Some(Poly::new(coeffs)))
}

fn divided_differences(xs: &[Rational], mut ys: Vec<Rational>) -> Vec<Rational> {
    let n = xs.len();
    for k in 1..n {
        for i in (k..n).rev() {
            ys[i] = (&ys[i] - &ys[i - 1]) / (&xs[i] - &xs[i - k]);
        }
    }
    ys
}

fn newton_eval(xs: &[Rational], a: &[Rational], x: &Rational) -> Rational {
    let mut acc = a[a.len() - 1].clone();
    for k in (0..a.len() - 1).rev() {
        acc = acc * (x - &xs[k]) + &a[k];
    }
    acc
}

fn newton_to_monomial(xs: &[Rational], a: &[Rational]) -> Vec<Rational> {
    let mut poly = vec![a[a.len() - 1].clone()];
    for k in (0..a.len() - 1).rev() {
        // poly ← poly·(x − x_k) + a_k
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &xs[k];
        }
        next[0] += &a[k];
        poly = next;
    }
    poly
}

/// Result of the exact sharpness verification.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessReport {
    /// Family kind (1 or 2).
    pub kind: u8,
    /// Degree.
    pub d: usize,
    /// Exact `M_f`.
    pub escape: Exponent,
    /// Exact `M_f^(1)` (`None` if all fixed multipliers vanish).
    pub m1: Option<Exponent>,
    /// Exact `M_f^(2)`.
    pub m2: Option<Exponent>,
    /// `(1/2) log|λ|` over the nonzero period-2 multipliers.
    pub slopes2: Vec<Exponent>,
    /// Predicted `(M, M^(1), M^(2))`.
    pub expected: (Exponent, Exponent, Exponent),
    /// Whether the family member is exactly in Ingram form with the stated
    /// critical points.
    pub ingram_form: bool,
    /// All equalities hold.
    pub pass: bool,
}

fn rational_to_exponent(q: &Rational) -> Exponent {
    Ratio::new(
        q.numer().to_i64().expect("small rational"),
        q.denom().to_i64().expect("small rational"),
    )
}

/// Predicted `(M, M^(1), M^(2))` for a sharp family.
pub fn sharpness_prediction(kind: u8, d: usize) -> (Exponent, Exponent, Exponent) {
    let one = exp_int(1);
    if kind == 1 {
        (one, exp_int(0), rational_to_exponent(&c_d(d)))
    } else {
        let r = Ratio::new(d as i64 - 1, d as i64 - 2);
        (one, r, r)
    }
}

/// Exact `(M, M^(1), M^(2))` of a sharp family over the series field, with
/// the comparison against the predicted values.
pub fn verify_sharpness(kind: u8, d: usize) -> Result<SharpnessReport> {
    if !(kind == 1 || kind == 2) {
        return Err(Error::InvalidInput(format!("family kind must be 1 or 2, got {kind}")));
    }
    if !(d == 4 || d == 5) {
        return Err(Error::InvalidInput(format!("sharpness is verified for d ∈ {{4, 5}}, got {d}")));
    }
    let t = PuiseuxSeries::t(DEFAULT_WINDOW);
    let f = sharp_family::<PuiseuxSeries>(kind, d, &t)?;
    let crit = sharp_critical_points::<PuiseuxSeries>(kind, d, &t)?;
    let ingram_form = is_ingram_form(&f, &crit)?;
    let escape = nonarch_escape(&crit, d)?;
    let e1 = nonarch_char_exponent(&f, 1)?;
    let e2 = nonarch_char_exponent(&f, 2)?;
    let expected = sharpness_prediction(kind, d);
    let pass = ingram_form && escape == expected.0 && e1.max == Some(expected.1) && e2.max == Some(expected.2);
    Ok(SharpnessReport { kind, d, escape, m1: e1.max, m2: e2.max, slopes2: e2.slopes, expected, ingram_form, pass })
}

/// `f = f_c`: leading coefficient `1/d`, `f(0) = 0` and `f′ = ∏(z − c_j)`.
fn is_ingram_form(f: &Poly<PuiseuxSeries>, c: &[PuiseuxSeries]) -> Result<bool> {
    let d = f.deg();
    let lc_ok = f.coeff(d).sub(&PuiseuxSeries::constant(Rational::new(BigInt::from(1), BigInt::from(d)))).is_known_zero();
    let mut deriv = Poly::one();
    for cj in c {
        deriv = deriv.mul(&Poly::new(vec![cj.neg(), PuiseuxSeries::one()]));
    }
    let diff = f.derivative().sub(&deriv);
    Ok(lc_ok && f.coeff(0).is_known_zero() && diff.coeffs().iter().all(PuiseuxSeries::is_known_zero) && !c.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::rat;
    use proptest::prelude::*;

    fn e(n: i64, d: i64) -> Exponent {
        Ratio::new(n, d)
    }

    fn series(terms: &[(i64, i64)]) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(terms.iter().map(|&(x, c)| (exp_int(x), rat(c, 1))).collect(), None, exp_int(DEFAULT_WINDOW))
            .unwrap()
    }

    fn lam_poly(cs: Vec<PuiseuxSeries>) -> Poly<PuiseuxSeries> {
        Poly::new(cs)
    }

    #[test]
    fn arithmetic_examples() {
        let t = PuiseuxSeries::t(DEFAULT_WINDOW);
        let one = PuiseuxSeries::one();
        assert_eq!(t.add(&one).valuation().unwrap(), Some(exp_int(1)));
        let prod = t.mul(&t.inv().unwrap());
        assert_eq!(prod.terms(), &[(exp_int(0), rat(1, 1))]);
        assert_eq!(prod.floor(), None);
        let geo = one.div(&t.sub(&one)).unwrap();
        assert_eq!(geo.terms().len(), DEFAULT_WINDOW as usize + 1);
        for (k, (ex, c)) in geo.terms().iter().enumerate() {
            assert_eq!(*ex, exp_int(-1 - k as i64));
            assert_eq!(*c, rat(1, 1));
        }
        assert_eq!(geo.floor(), Some(exp_int(-1 - DEFAULT_WINDOW)));
    }

    #[test]
    fn cancellation_exhausts_window() {
        let t = PuiseuxSeries::t(4);
        let one = PuiseuxSeries::one();
        let a = one.div(&t.sub(&one)).unwrap();
        let b = one.div(&t).unwrap().add(&one.div(&t.mul(&t)).unwrap());
        let diff = a.sub(&b);
        assert_eq!(diff.valuation().unwrap(), Some(exp_int(-3)));
        let c = a.sub(&a);
        assert!(!c.is_certified());
        assert!(matches!(c.inv(), Err(Error::WindowExhausted(_))));
    }

    #[test]
    fn ramification_cap() {
        assert!(PuiseuxSeries::from_terms(vec![(e(1, 13), rat(1, 1))], None, exp_int(40)).is_err());
        let s = PuiseuxSeries::from_terms(vec![(e(1, 4), rat(1, 1)), (e(-1, 3), rat(2, 1))], None, exp_int(40)).unwrap();
        assert_eq!(s.ramification(), 12);
    }

    #[test]
    fn json_roundtrip() {
        let v = serde_json::json!([["3/2", "1/2"], [0, 1]]);
        let s = series_from_json(&v).unwrap();
        assert_eq!(s.valuation().unwrap(), Some(e(3, 2)));
        assert_eq!(series_to_json(&s)["terms"], serde_json::json!([["3/2", "1/2"], ["0", "1"]]));
        assert!(series_from_json(&serde_json::json!([[1]])).is_err());
    }

    #[test]
    fn newton_polygon_examples() {
        let t = series(&[(1, 1)]);
        let one = series(&[(0, 1)]);
        let np = newton_polygon(&lam_poly(vec![one.clone(), t.neg(), one.clone()])).unwrap();
        assert_eq!(np.segments, vec![(exp_int(1), 1), (exp_int(-1), 1)]);
        let np = newton_polygon(&lam_poly(vec![t.neg(), one.clone()])).unwrap();
        assert_eq!(np.segments, vec![(exp_int(1), 1)]);
        let np = newton_polygon(&lam_poly(vec![t.mul(&t).neg(), PuiseuxSeries::zero(), one.clone()])).unwrap();
        assert_eq!(np.segments, vec![(exp_int(1), 2)]);
        let np = newton_polygon(&lam_poly(vec![PuiseuxSeries::zero(), t.clone(), one])).unwrap();
        assert_eq!((np.zero_roots, np.segments), (1, vec![(exp_int(1), 1)]));
    }

    #[test]
    fn escape_examples() {
        let t = PuiseuxSeries::t(DEFAULT_WINDOW);
        assert_eq!(nonarch_escape(&[t.clone(), PuiseuxSeries::one()], 3).unwrap(), exp_int(1));
        assert_eq!(nonarch_escape(&[t.inv().unwrap()], 2).unwrap(), exp_int(0));
        assert_eq!(nonarch_escape(&vec![PuiseuxSeries::zero(); 2], 3).unwrap(), exp_int(0));
        assert!(nonarch_escape(&[t], 3).is_err());
    }

    #[test]
    fn power_map_exponent_is_zero() {
        for d in 2..=4 {
            let mut co = vec![PuiseuxSeries::zero(); d + 1];
            co[d] = PuiseuxSeries::one();
            let f = Poly::new(co);
            for p in 1..=2 {
                let r = nonarch_char_exponent(&f, p).unwrap();
                assert_eq!(r.max, Some(exp_int(0)), "d={d} p={p}");
            }
        }
    }

    #[test]
    fn degree_of_chi_matches_count() {
        let t = PuiseuxSeries::t(DEFAULT_WINDOW);
        let f = Poly::new(vec![t.clone(), PuiseuxSeries::one(), t.inv().unwrap(), PuiseuxSeries::one()]);
        for p in 1..=2 {
            let r = nonarch_char_exponent(&f, p).unwrap();
            assert_eq!(r.chi.deg(), cycle_counts(3, p as u64).unwrap().n as usize);
        }
    }

    #[test]
    fn quadratic_exponents() {
        // z^2 + t: fixed points ≈ ±t^{1/2}, multipliers 2z, so M^(1) = 1/2.
        let t = PuiseuxSeries::t(DEFAULT_WINDOW);
        let f = Poly::new(vec![t, PuiseuxSeries::zero(), PuiseuxSeries::one()]);
        assert_eq!(nonarch_char_exponent(&f, 1).unwrap().max, Some(e(1, 2)));
        assert_eq!(nonarch_char_exponent(&f, 2).unwrap().max, Some(e(1, 2)));
    }

    #[test]
    fn sharpness_kind2_d4() {
        let r = verify_sharpness(2, 4).unwrap();
        assert!(r.ingram_form);
        assert_eq!((r.escape, r.m1, r.m2), (exp_int(1), Some(e(3, 2)), Some(e(3, 2))));
        assert!(r.slopes2.contains(&e(9, 8)), "{:?}", r.slopes2);
        assert!(r.pass);
    }

    #[test]
    fn sharpness_kind1() {
        let r = verify_sharpness(1, 4).unwrap();
        assert_eq!((r.escape, r.m1, r.m2), (exp_int(1), Some(exp_int(0)), Some(e(3, 2))));
        assert!(r.pass);
        let r = verify_sharpness(1, 5).unwrap();
        assert_eq!((r.escape, r.m1, r.m2), (exp_int(1), Some(exp_int(0)), Some(e(5, 3))));
        assert!(r.pass);
    }

    #[test]
    fn sharpness_kind2_d5() {
        let r = verify_sharpness(2, 5).unwrap();
        assert_eq!((r.escape, r.m1, r.m2), (exp_int(1), Some(e(4, 3)), Some(e(4, 3))));
        assert!(r.pass);
    }

    #[test]
    fn elimination_and_interpolation_agree() {
        let t = PuiseuxSeries::t(DEFAULT_WINDOW);
        let cubic = Poly::new(vec![t.clone(), PuiseuxSeries::one(), t.inv().unwrap(), PuiseuxSeries::constant(rat(1, 3))]);
        for p in 1..=2 {
            assert_eq!(multiplier_poly_series(&cubic, p).unwrap(), multiplier_poly_laurent(&cubic, p).unwrap(), "p={p}");
        }
        let quartic = sharp_family::<PuiseuxSeries>(2, 4, &t).unwrap();
        assert_eq!(multiplier_poly_series(&quartic, 1).unwrap(), multiplier_poly_laurent(&quartic, 1).unwrap());
    }

    #[test]
    fn ramified_input() {
        // z^2 + t^{1/2}: fixed points ≈ ±t^{1/4}, so M^(1) = 1/4.
        let c = PuiseuxSeries::from_terms(vec![(e(1, 2), rat(1, 1))], None, exp_int(DEFAULT_WINDOW)).unwrap();
        let f = Poly::new(vec![c, PuiseuxSeries::zero(), PuiseuxSeries::one()]);
        assert_eq!(nonarch_char_exponent(&f, 1).unwrap().max, Some(e(1, 4)));
    }

    #[test]
    fn truncated_input_is_rejected() {
        let t = PuiseuxSeries::t(DEFAULT_WINDOW);
        let trunc = PuiseuxSeries::one().div(&t.sub(&PuiseuxSeries::one())).unwrap();
        let f = Poly::new(vec![trunc, PuiseuxSeries::zero(), PuiseuxSeries::one()]);
        assert!(matches!(nonarch_char_exponent(&f, 1), Err(Error::InvalidInput(_))));
    }

    fn arb_series() -> impl Strategy<Value = PuiseuxSeries> {
        prop::collection::vec((-6i64..6, 1i64..4, -5i64..5), 1..5).prop_map(|v| {
            let terms = v.into_iter().map(|(n, d, c)| (Ratio::new(n, d), rat(c, 1))).collect();
            PuiseuxSeries::from_terms(terms, None, exp_int(DEFAULT_WINDOW)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ultrametric(a in arb_series(), b in arb_series()) {
            let s = a.add(&b);
            let (va, vb, vs) = (a.valuation().unwrap(), b.valuation().unwrap(), s.valuation().unwrap());
            if let (Some(va), Some(vb)) = (va, vb) {
                if let Some(vs) = vs {
                    prop_assert!(vs <= va.max(vb));
                }
                if va != vb {
                    prop_assert_eq!(vs, Some(va.max(vb)));
                }
            }
        }

        #[test]
        fn newton_polygon_of_product_merges(r1 in prop::collection::vec((-4i64..5, 1i64..3), 1..4),
                                            r2 in prop::collection::vec((-4i64..5, 1i64..3), 1..4)) {
            let build = |roots: &[(i64, i64)]| {
                roots.iter().fold(Poly::one(), |acc: Poly<PuiseuxSeries>, &(ex, c)| {
                    let root = PuiseuxSeries::monomial(rat(c, 1), exp_int(ex));
                    acc.mul(&Poly::new(vec![root.neg(), PuiseuxSeries::one()]))
                })
            };
            let (p1, p2) = (build(&r1), build(&r2));
            let mut want = newton_polygon(&p1).unwrap().root_valuations();
            want.extend(newton_polygon(&p2).unwrap().root_valuations());
            want.sort_by(|a, b| b.cmp(a));
            prop_assert_eq!(newton_polygon(&p1.mul(&p2)).unwrap().root_valuations(), want);
        }
    }
}
