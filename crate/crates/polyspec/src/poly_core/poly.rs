//! Dense univariate polynomials over a [`Ring`] or [`Field`].

use crate::error::{Error, Result};
use crate::poly_core::field::{Field, Ring};

/// Largest number of coefficients an iterate may have before [`Poly::iterate`]
/// refuses to expand it.
pub const MAX_ITERATE_COEFFS: usize = 1 << 16;

/// Dense polynomial with coefficients stored low-to-high.
///
/// Exactly-zero leading coefficients are trimmed on construction, so the last
/// stored coefficient is the leading one. The zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    /// Build from coefficients `c[j]` of `z^j`.
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Poly::constant(R::one())
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Poly::new(vec![R::zero(), R::one()])
    }

    /// Constant polynomial.
    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// `c · z^k`.
    pub fn monomial(c: R, k: usize) -> Self {
        let mut v = vec![R::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// Coefficients low-to-high.
    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Consume into the coefficient vector.
    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading coefficient.
    pub fn lc(&self) -> Option<&R> {
        self.coeffs.last()
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    /// Sum.
    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => R::zero(),
            })
            .collect();
        Poly::new(v)
    }

    /// Difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    /// Product (schoolbook).
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Poly::new(v)
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Non-negative integer power.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one();
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

    /// Composition `self ∘ g`, i.e. `z ↦ self(g(z))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// The n-th iterate `self^{∘n}`, with `self^{∘0} = z`.
    pub fn iterate(&self, n: u32) -> Result<Self> {
        let d = self.deg();
        if self.is_zero() || d == 0 {
            return Err(Error::InvalidInput("iterate needs a polynomial of degree at least 1".into()));
        }
        let mut coeffs = 1usize;
        for _ in 0..n {
            coeffs = coeffs.saturating_mul(d);
        }
        if coeffs + 1 > MAX_ITERATE_COEFFS {
            return Err(Error::DegreeOverflow(format!(
                "iterate of degree {d} to depth {n} exceeds {MAX_ITERATE_COEFFS} coefficients"
            )));
        }
        let mut acc = Poly::identity();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&R::from_i64(k as i64)))
                .collect(),
        )
    }

    /// Apply a coefficient map into another ring.
    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![R::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v)
    }
}

impl<F: Field> Poly<F> {
    /// Largest coefficient magnitude (used to scale float tolerances).
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lc = &d.coeffs[dd];
        // Exact backends divide by the leading coefficient directly, which
        // keeps quotients exact over rings of Laurent polynomials in `t`.
        let lc_inv = if F::EXACT { None } else { Some(lc.inv()?) };
        if lc.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = match &lc_inv {
                Some(inv) => r[k + dd].mul(inv),
                None => r[k + dd].div(lc)?,
            };
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(dc));
                }
            }
            r[k + dd] = F::zero();
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Division that must be exact.
    ///
    /// On exact backends the remainder must vanish identically; on the float
    /// backend every remainder coefficient must be below `1e-10` times the
    /// coefficient scale of the dividend.
    pub fn exact_quotient(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        let tol = 1e-10 * self.coeff_scale().max(f64::MIN_POSITIVE);
        if let Some(bad) = r.coeffs.iter().find(|c| !c.is_negligible(tol)) {
            return Err(Error::InexactDivision(format!(
                "remainder coefficient {bad:?} is not zero"
            )));
        }
        Ok(q)
    }

    /// Remainder modulo a divisor.
    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Scale to leading coefficient one.
    pub fn monic(&self) -> Result<Self> {
        let lc = self.lc().ok_or(Error::DivisionByZero)?;
        Ok(self.scale(&lc.inv()?))
    }

    /// Monic `R` with `R^p = self`, by coefficient matching from the top degree.
    ///
    /// Writing `Q̃(x) = x^n Q(1/x)` and `R̃(x) = x^m R(1/x)`, the reversed
    /// coefficients satisfy `R̃ = Q̃^{1/p}` as power series, which gives the
    /// recurrence `k·r_k = Σ_{j=1}^{k} (j/p − k + j) q_j r_{k−j}`. The residual
    /// `R^p − Q` is then checked: exactly zero on exact backends, below
    /// `rel_tol` times the coefficient scale on the float backend.
    pub fn pth_root(&self, p: usize, rel_tol: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("p-th root with p = 0".into()));
        }
        let n = self.degree().ok_or_else(|| Error::NotPthPower { p, detail: "zero polynomial".into() })?;
        if n % p != 0 {
            return Err(Error::NotPthPower { p, detail: format!("degree {n} not divisible by {p}") });
        }
        let lc = &self.coeffs[n];
        let scale = self.coeff_scale().max(f64::MIN_POSITIVE);
        if !lc.sub(&F::one()).is_negligible(rel_tol.max(1e-12)) {
            return Err(Error::InvalidInput("p-th root needs a monic polynomial".into()));
        }
        let m = n / p;
        let qrev: Vec<F> = (0..=m).map(|j| self.coeffs[n - j].clone()).collect();
        let pinv = F::from_i64(p as i64).inv()?;
        let mut r = vec![F::one()];
        for k in 1..=m {
            let mut acc = F::zero();
            for j in 1..=k {
                // (j/p − k + j)
                let w = F::from_i64(j as i64).mul(&pinv).add(&F::from_i64(j as i64 - k as i64));
                acc = acc.add(&w.mul(&qrev[j]).mul(&r[k - j]));
            }
            r.push(acc.mul(&F::from_i64(k as i64).inv()?));
        }
        r.reverse();
        let root = Poly::new(r);
        let residual = root.pow(p as u32).sub(self);
        let tol = rel_tol * scale;
        if let Some(bad) = residual.coeffs.iter().find(|c| !c.is_negligible(tol)) {
            return Err(Error::NotPthPower { p, detail: format!("residual coefficient {bad:?}") });
        }
        Ok(root)
    }
}

impl<F: Field> Ring for Poly<F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn from_i64(n: i64) -> Self {
        Poly::constant(F::from_i64(n))
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        Poly::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Poly::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Poly::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn exact_div(&self, rhs: &Self) -> Result<Self> {
        self.exact_quotient(rhs)
    }
}
