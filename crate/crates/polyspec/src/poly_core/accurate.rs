//! Double-double complex arithmetic for accurate polynomial evaluation.
//!
//! Periodic points of polynomials with large coefficients are only well
//! determined when `f^{∘p}(z) − z` can be evaluated with a relative error far
//! below the double-precision unit roundoff. The types here carry an unevaluated
//! `hi + lo` pair built from error-free transformations.

use num_complex::Complex64;

use crate::poly_core::field::{rational_to_f64, Rational};

/// Unit roundoff of double-double arithmetic (a safe upper estimate).
pub const DD_EPS: f64 = 1.0e-31;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Real double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    /// Leading part.
    pub hi: f64,
    /// Trailing correction.
    pub lo: f64,
}

impl Dd {
    /// Exact embedding of a double.
    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to a rational.
    pub fn from_rational(q: &Rational) -> Self {
        let hi = rational_to_f64(q);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rest = match num_rational::BigRational::from_float(hi) {
            Some(h) => rational_to_f64(&(q - h)),
            None => 0.0,
        };
        let (hi, lo) = quick_two_sum(hi, rest);
        Dd { hi, lo }
    }

    /// Sum.
    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    /// Negation.
    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    /// Difference.
    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    /// Product.
    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Rounded value.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Complex double-double number.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdC {
    /// Real part.
    pub re: Dd,
    /// Imaginary part.
    pub im: Dd,
}

impl DdC {
    /// Zero.
    pub const ZERO: DdC = DdC { re: Dd::from_f64(0.0), im: Dd::from_f64(0.0) };

    /// Exact embedding of a double-precision complex number.
    pub fn from_c64(z: Complex64) -> Self {
        DdC { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    /// Rounded value.
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Sum.
    #[inline]
    pub fn add(self, o: DdC) -> DdC {
        DdC { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    /// Difference.
    #[inline]
    pub fn sub(self, o: DdC) -> DdC {
        DdC { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    /// Product.
    #[inline]
    pub fn mul(self, o: DdC) -> DdC {
        DdC {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    /// Modulus rounded to a double.
    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}

/// A polynomial prepared for double-double evaluation.
#[derive(Clone, Debug)]
pub struct DdPoly {
    coeffs: Vec<DdC>,
    deriv: Vec<DdC>,
    abs: Vec<f64>,
}

impl DdPoly {
    fn build(coeffs: Vec<DdC>) -> Self {
        let deriv = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.mul(DdC::from_c64(Complex64::new(k as f64, 0.0))))
            .collect();
        let abs = coeffs.iter().map(|c| c.norm()).collect();
        DdPoly { coeffs, deriv, abs }
    }

    /// From double-precision complex coefficients (low-to-high).
    pub fn from_c64(coeffs: &[Complex64]) -> Self {
        Self::build(coeffs.iter().map(|&c| DdC::from_c64(c)).collect())
    }

    /// From exact rational coefficients (low-to-high), rounded to double-double.
    pub fn from_rational(coeffs: &[Rational]) -> Self {
        Self::build(
            coeffs
                .iter()
                .map(|c| DdC { re: Dd::from_rational(c), im: Dd::default() })
                .collect(),
        )
    }

    /// Degree (0 for constants).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Value at `z` by Horner's rule.
    pub fn eval(&self, z: DdC) -> DdC {
        horner(&self.coeffs, z)
    }

    /// Derivative at `z`.
    pub fn eval_deriv(&self, z: DdC) -> DdC {
        horner(&self.deriv, z)
    }

    /// `Σ |a_k| r^k`, the natural scale of rounding errors at radius `r`.
    pub fn abs_bound(&self, r: f64) -> f64 {
        self.abs.iter().rev().fold(0.0, |acc, &a| acc * r + a)
    }
}

fn horner(coeffs: &[DdC], z: DdC) -> DdC {
    coeffs.iter().rev().fold(DdC::ZERO, |acc, &c| acc.mul(z).add(c))
}
