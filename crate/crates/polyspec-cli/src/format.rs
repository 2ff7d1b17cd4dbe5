//! Input reading and output formatting helpers.

use std::path::Path;

use num_traits::{One, Signed, Zero};
use polyspec::poly_core::json::{complex_to_json, poly_from_json, rational_to_json};
use polyspec::poly_core::{format_rational, AnyPoly, Rational, C64};
use serde_json::Value;

use crate::CliError;

/// Parse an option value as inline JSON, or else as the path of a JSON file.
pub fn read_json(arg: &str) -> Result<Value, CliError> {
    let text = arg.trim_start();
    if text.starts_with('[') || text.starts_with('{') {
        return serde_json::from_str(arg).map_err(|e| CliError::Usage(format!("invalid JSON {arg:?}: {e}")));
    }
    let path = Path::new(arg);
    let content =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&content).map_err(|e| CliError::Usage(format!("invalid JSON in {}: {e}", path.display())))
}

/// Read a polynomial from inline JSON or a file.
pub fn read_poly(arg: &str) -> Result<AnyPoly, CliError> {
    Ok(poly_from_json(&read_json(arg)?)?)
}

/// JSON conversion for the two scalar backends.
pub trait ScalarJson {
    /// JSON form of the scalar.
    fn to_json(&self) -> Value;
}

impl ScalarJson for Rational {
    fn to_json(&self) -> Value {
        rational_to_json(self)
    }
}

impl ScalarJson for C64 {
    fn to_json(&self) -> Value {
        complex_to_json(self)
    }
}

/// JSON array of scalars.
pub fn array<T: ScalarJson>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(ScalarJson::to_json).collect())
}

/// JSON number, or `null` when not finite (for example `M^(p) = −∞`).
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Human-readable form of a rational polynomial in `var`, highest degree
/// first, such as `λ^2 - 2λ`.
pub fn poly_text(coeffs: &[Rational], var: &str) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let abs = c.abs();
        let show_coeff = k == 0 || !abs.is_one();
        if show_coeff {
            let s = format_rational(&abs);
            if k > 0 && s.contains('/') {
                out.push_str(&format!("({s})"));
            } else {
                out.push_str(&s);
            }
        }
        match k {
            0 => {}
            1 => out.push_str(var),
            _ => out.push_str(&format!("{var}^{k}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
