//! Scalar backends.
//!
//! Every algorithm in the crate is written against the [`Ring`] and [`Field`]
//! traits. Two backends are provided here: exact rationals ([`Rational`]) and
//! double-precision complex numbers ([`C64`]). The non-Archimedean module adds
//! a third backend of truncated Puiseux series.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar (always in lowest terms with positive denominator).
pub type Rational = BigRational;
/// Double-precision complex scalar.
pub type C64 = Complex64;

/// A commutative ring with the operations needed by elimination algorithms.
pub trait Ring: Clone + Debug + Send + Sync + 'static {
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// Embedding of the integers.
    fn from_i64(n: i64) -> Self;
    /// True when the element is known to be exactly zero.
    fn is_zero(&self) -> bool;
    /// Sum.
    fn add(&self, rhs: &Self) -> Self;
    /// Difference.
    fn sub(&self, rhs: &Self) -> Self;
    /// Product.
    fn mul(&self, rhs: &Self) -> Self;
    /// Additive inverse.
    fn neg(&self) -> Self;
    /// Division that is known to be exact in the ring.
    fn exact_div(&self, rhs: &Self) -> Result<Self>;
    /// Preference of the element as an elimination pivot (larger is better).
    ///
    /// `None` marks an element that must not be used as a pivot.
    fn pivot_weight(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(1.0)
        }
    }
}

/// A field of characteristic zero.
pub trait Field: Ring {
    /// True for backends where equality is exact.
    const EXACT: bool;
    /// Multiplicative inverse.
    fn inv(&self) -> Result<Self>;
    /// Embedding of the rationals.
    fn from_rational(q: &Rational) -> Self;
    /// Whether the element counts as zero relative to an absolute tolerance.
    ///
    /// Exact backends ignore the tolerance and test for exact zero.
    fn is_negligible(&self, abs_tol: f64) -> bool;
    /// Size of the element used to scale float tolerances (0 on exact backends
    /// is never used for decisions).
    fn magnitude(&self) -> f64;
    /// Quotient.
    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }
    /// Integer power by repeated squaring.
    fn powu(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, rhs: &Self) -> Result<Self> {
        Field::div(self, rhs)
    }
    fn pivot_weight(&self) -> Option<f64> {
        if Ring::is_zero(self) {
            None
        } else {
            // Prefer small entries to limit coefficient growth.
            let bits = self.numer().bits() + self.denom().bits();
            Some(-(bits as f64))
        }
    }
}

impl Field for Rational {
    const EXACT: bool = true;
    fn inv(&self) -> Result<Self> {
        if Ring::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_negligible(&self, _abs_tol: f64) -> bool {
        Ring::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }
}

impl Ring for C64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, rhs: &Self) -> Result<Self> {
        Field::div(self, rhs)
    }
    fn pivot_weight(&self) -> Option<f64> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(n)
        } else {
            None
        }
    }
}

impl Field for C64 {
    const EXACT: bool = false;
    fn inv(&self) -> Result<Self> {
        if Ring::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(cdiv(Complex64::new(1.0, 0.0), *self))
        }
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if Ring::is_zero(rhs) {
            Err(Error::DivisionByZero)
        } else {
            Ok(cdiv(*self, *rhs))
        }
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn is_negligible(&self, abs_tol: f64) -> bool {
        self.norm() <= abs_tol
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Complex quotient by Smith's method, which avoids the overflow of
/// `|b|^2` for large moduli.
pub fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// Nearest double to a rational, robust for numerators and denominators far
/// outside the double range.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    // Shift so that the quotient keeps about 64 significant bits.
    let shift = nb - db - 64;
    let (n, d) = if shift > 0 {
        (q.numer().clone(), q.denom() << (shift as usize))
    } else {
        (q.numer() << ((-shift) as usize), q.denom().clone())
    };
    let quotient = (n / d).to_f64().unwrap_or(0.0);
    ldexp(quotient, shift)
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> Result<Rational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

/// `x · 2^e` without intermediate overflow for large |e|.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Decompose a finite nonzero double as `m · 2^e` with `0.5 ≤ |m| < 1`.
pub fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        // Subnormal: rescale into the normal range first.
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = exp - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e)
}

/// Absolute value of a rational as a double-free base-2 logarithm estimate.
pub fn rational_log2_abs(q: &Rational) -> f64 {
    if Ring::is_zero(q) {
        return f64::NEG_INFINITY;
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        rational_to_f64(&(q.abs() * BigRational::from_integer(BigInt::one() << (shift as usize))))
    } else {
        rational_to_f64(&(q.abs() / BigRational::from_integer(BigInt::one() << ((-shift) as usize))))
    };
    scaled.log2() - shift as f64
}

/// Parse `"p/q"` or `"n"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Format a rational as `"p/q"`, or `"n"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_conversion_handles_huge_values() {
        let big = BigRational::from_integer(BigInt::from(3) << 2000usize);
        let q = big.clone() / BigRational::from_integer(BigInt::one() << 1999usize);
        assert_eq!(rational_to_f64(&q), 6.0);
        assert!((rational_log2_abs(&big) - (2000.0 + 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn frexp_and_ldexp_roundtrip() {
        for &x in &[1.0, -3.5, 1e-310, 7.25e200] {
            let (m, e) = frexp(x);
            assert!((0.5..1.0).contains(&m.abs()));
            assert_eq!(ldexp(m, e), x);
        }
    }

    #[test]
    fn smith_division_survives_large_moduli() {
        let a = Complex64::new(3e200, -4e200);
        let b = Complex64::new(1e250, 2e250);
        let q = cdiv(a, b);
        let expect = Complex64::new(-1.0, -2.0) * 1e-50;
        assert!((q - expect).norm() < 1e-14 * expect.norm());
        assert_eq!(cdiv(Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)), Complex64::new(0.0, -0.5));
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(format_rational(&rat(-3, 2)), "-3/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
