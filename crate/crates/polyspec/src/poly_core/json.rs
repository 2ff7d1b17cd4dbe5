//! JSON interchange for polynomials and scalars.
//!
//! A polynomial is a JSON array of coefficients, low degree first. Exact
//! rationals are strings `"p/q"` (bare JSON integers are accepted too) and
//! complex floats are two-element arrays `[re, im]` (bare non-integer numbers
//! are read as real floats).

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly_core::field::{format_rational, parse_rational, rational_to_f64, Rational, C64};
use crate::poly_core::poly::Poly;

/// A polynomial on either scalar backend.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoly {
    /// Exact rational coefficients.
    Exact(Poly<Rational>),
    /// Complex floating coefficients.
    Float(Poly<C64>),
}

impl AnyPoly {
    /// The polynomial on the float backend (exact inputs are rounded).
    pub fn to_float(&self) -> Poly<C64> {
        match self {
            AnyPoly::Exact(p) => to_float_poly(p),
            AnyPoly::Float(p) => p.clone(),
        }
    }

    /// The polynomial on the exact backend; float inputs are rejected.
    pub fn to_exact(&self) -> Result<Poly<Rational>> {
        match self {
            AnyPoly::Exact(p) => Ok(p.clone()),
            AnyPoly::Float(_) => Err(Error::BackendMismatch("exact backend requested for float coefficients".into())),
        }
    }
}

/// Round an exact polynomial to the float backend.
pub fn to_float_poly(p: &Poly<Rational>) -> Poly<C64> {
    p.map(|c| Complex64::new(rational_to_f64(c), 0.0))
}

/// Parse a polynomial from a JSON value.
pub fn poly_from_json(v: &Value) -> Result<AnyPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("polynomial must be a JSON array of coefficients".into()))?;
    let is_exact = |x: &Value| x.is_string() || x.is_i64() || x.is_u64();
    if arr.iter().all(is_exact) {
        let coeffs = arr.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?;
        Ok(AnyPoly::Exact(Poly::new(coeffs)))
    } else {
        let coeffs = arr.iter().map(complex_from_json).collect::<Result<Vec<_>>>()?;
        Ok(AnyPoly::Float(Poly::new(coeffs)))
    }
}

/// Parse a polynomial from JSON text.
pub fn poly_from_str(s: &str) -> Result<AnyPoly> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    poly_from_json(&v)
}

/// Read an exact rational from a string or integer JSON value.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        _ => Err(Error::Parse(format!("expected a rational, found {v}"))),
    }
}

/// Read a complex number from `[re, im]`, a number, or a rational string.
pub fn complex_from_json(v: &Value) -> Result<C64> {
    let z = match v {
        Value::Array(a) if a.len() == 2 => {
            let part = |x: &Value| {
                x.as_f64()
                    .ok_or_else(|| Error::Parse(format!("complex parts must be numbers, found {x}")))
            };
            Complex64::new(part(&a[0])?, part(&a[1])?)
        }
        Value::Number(n) => Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0),
        Value::String(s) => Complex64::new(rational_to_f64(&parse_rational(s)?), 0.0),
        _ => return Err(Error::Parse(format!("expected a complex number, found {v}"))),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Parse(format!("non-finite complex value {v}")))
    }
}

/// JSON form of an exact rational.
pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

/// JSON form of a complex number.
pub fn complex_to_json(z: &C64) -> Value {
    json!([z.re, z.im])
}

/// JSON form of a polynomial on either backend.
pub fn poly_to_json(p: &AnyPoly) -> Value {
    match p {
        AnyPoly::Exact(p) => Value::Array(p.coeffs().iter().map(rational_to_json).collect()),
        AnyPoly::Float(p) => Value::Array(p.coeffs().iter().map(complex_to_json).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::rat;

    #[test]
    fn exact_and_float_inputs() {
        let p = poly_from_str(r#"["1/2", 0, "-3"]"#).unwrap();
        assert_eq!(p, AnyPoly::Exact(Poly::new(vec![rat(1, 2), rat(0, 1), rat(-3, 1)])));
        assert_eq!(poly_to_json(&p).to_string(), r#"["1/2","0","-3"]"#);
        let q = poly_from_str("[[1.5, -2], 0.5, 1]").unwrap();
        let AnyPoly::Float(q) = q else { panic!("expected float") };
        assert_eq!(q.coeffs()[0], Complex64::new(1.5, -2.0));
        assert_eq!(q.coeffs()[1], Complex64::new(0.5, 0.0));
        assert!(poly_from_str(r#"{"a": 1}"#).is_err());
        assert!(poly_from_str(r#"["1/0"]"#).is_err());
    }
}
