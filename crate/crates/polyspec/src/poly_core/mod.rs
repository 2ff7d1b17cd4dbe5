//! Scalar backends and polynomial arithmetic shared by every other module.

pub mod accurate;
pub mod ext;
pub mod field;
pub mod json;
pub mod linalg;
pub mod matching;
pub mod modular;
pub mod poly;
pub mod roots;

pub use field::{format_rational, parse_rational, rat, rational_to_f64, Field, Rational, Ring, C64};
pub use json::AnyPoly;
pub use linalg::{charpoly, det_bareiss, norm_polynomial, resultant, sylvester};
pub use matching::{multiset_match, MatchReport, DEFAULT_MATCH_TOL};
pub use poly::Poly;
pub use roots::{complex_roots, rational_roots};

/// Composition `f ∘ g`.
pub fn compose<R: Ring>(f: &Poly<R>, g: &Poly<R>) -> Poly<R> {
    f.compose(g)
}

/// The `n`-th iterate `f^{∘n}` (`f^{∘0} = z`).
pub fn iterate<R: Ring>(f: &Poly<R>, n: u32) -> crate::error::Result<Poly<R>> {
    f.iterate(n)
}

/// Formal derivative.
pub fn derivative<R: Ring>(f: &Poly<R>) -> Poly<R> {
    f.derivative()
}

/// Monic `p`-th root of a monic polynomial.
pub fn poly_pth_root<F: Field>(q: &Poly<F>, p: usize) -> crate::error::Result<Poly<F>> {
    q.pth_root(p, 1e-8)
}
