//! Multiplier spectra of polynomial maps.
//!
//! The crate computes dynatomic and multiplier polynomials over exact
//! rationals, complex floats and truncated Puiseux series, and uses them to
//! check inequalities between multipliers at small periods and escape rates
//! of critical points. It also implements explicit normal forms and
//! reconstructions on low-degree moduli spaces, and the Jacobians of
//! multiplier maps at the power map `z^d`.

pub mod acceptance;
pub mod error;
pub mod escape;
pub mod linearization;
pub mod moduli;
pub mod nonarch;
pub mod poly_core;
pub mod spectra;

pub use error::{Error, Result};
