//! Complex numbers with an extended binary exponent.
//!
//! Polynomials with exact rational coefficients can have coefficients far
//! outside the double range (products of many large multipliers). Root finding
//! evaluates such polynomials with a complex mantissa and a separate `i64`
//! exponent so that nothing overflows.

use num_complex::Complex64;

use crate::poly_core::field::{frexp, ldexp, rational_log2_abs, rational_to_f64, Rational};

/// `m · 2^e` with `max(|re m|, |im m|) ∈ [0.5, 1)`, or the zero value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtC {
    m: Complex64,
    e: i64,
}

impl ExtC {
    /// Zero.
    pub const ZERO: ExtC = ExtC { m: Complex64::new(0.0, 0.0), e: 0 };

    /// Normalize an arbitrary mantissa/exponent pair.
    pub fn new(m: Complex64, e: i64) -> Self {
        let big = m.re.abs().max(m.im.abs());
        if big == 0.0 || !big.is_finite() {
            return ExtC { m: if big == 0.0 { Complex64::new(0.0, 0.0) } else { m }, e: 0 };
        }
        let (_, k) = frexp(big);
        ExtC { m: Complex64::new(ldexp(m.re, -k), ldexp(m.im, -k)), e: e + k }
    }

    /// From an ordinary complex number.
    pub fn from_c64(z: Complex64) -> Self {
        ExtC::new(z, 0)
    }

    /// From a rational without overflow.
    pub fn from_rational(q: &Rational) -> Self {
        if num_traits::Zero::is_zero(q) {
            return ExtC::ZERO;
        }
        let l = rational_log2_abs(q).floor() as i64;
        let scaled = if l.abs() > 900 {
            let shift = num_rational::BigRational::from_integer(num_bigint::BigInt::from(1) << (l.unsigned_abs() as usize));
            if l > 0 {
                rational_to_f64(&(q / shift))
            } else {
                rational_to_f64(&(q * shift))
            }
        } else {
            return ExtC::new(Complex64::new(rational_to_f64(q), 0.0), 0);
        };
        ExtC::new(Complex64::new(scaled, 0.0), l)
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    /// Base-2 logarithm of the modulus (−∞ for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.norm().log2() + self.e as f64
        }
    }

    /// Convert to an ordinary complex number (saturating to ±∞ or 0).
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ldexp(self.m.re, self.e), ldexp(self.m.im, self.e))
    }

    /// Product.
    pub fn mul(&self, o: &ExtC) -> ExtC {
        ExtC::new(self.m * o.m, self.e + o.e)
    }

    /// Negation.
    pub fn neg(&self) -> ExtC {
        ExtC { m: -self.m, e: self.e }
    }

    /// Sum.
    pub fn add(&self, o: &ExtC) -> ExtC {
        if self.is_zero() {
            return *o;
        }
        if o.is_zero() {
            return *self;
        }
        let (a, b) = if self.e >= o.e { (self, o) } else { (o, self) };
        let shift = b.e - a.e;
        if shift < -120 {
            return *a;
        }
        let bm = Complex64::new(ldexp(b.m.re, shift), ldexp(b.m.im, shift));
        ExtC::new(a.m + bm, a.e)
    }

    /// Quotient as an ordinary complex number.
    pub fn div_to_c64(&self, o: &ExtC) -> Complex64 {
        let q = self.m / o.m;
        Complex64::new(ldexp(q.re, self.e - o.e), ldexp(q.im, self.e - o.e))
    }

    /// Modulus as an extended real stored in the real part.
    pub fn abs(&self) -> ExtC {
        ExtC::new(Complex64::new(self.m.norm(), 0.0), self.e)
    }
}

/// Evaluate `p(z)`, `p′(z)` and the running bound `Σ|a_k||z|^k`.
pub fn eval_with_bound(coeffs: &[ExtC], z: Complex64) -> (ExtC, ExtC, ExtC) {
    let ze = ExtC::from_c64(z);
    let za = ExtC::from_c64(Complex64::new(z.norm(), 0.0));
    let mut p = ExtC::ZERO;
    let mut dp = ExtC::ZERO;
    let mut bound = ExtC::ZERO;
    for c in coeffs.iter().rev() {
        dp = dp.mul(&ze).add(&p);
        p = p.mul(&ze).add(c);
        bound = bound.mul(&za).add(&c.abs());
    }
    (p, dp, bound)
}
