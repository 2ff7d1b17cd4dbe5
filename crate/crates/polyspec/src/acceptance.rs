//! End-to-end acceptance checks.
//!
//! Each criterion draws its samples from a seeded generator (one ChaCha
//! stream per sample index), runs the relevant library routines and reports
//! a single pass/fail outcome with a short summary. Samples are evaluated in
//! parallel; results are keyed by sample index, so outcomes do not depend on
//! scheduling.

use std::time::Instant;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::escape::{appendix_a_check, default_t_grid, random_ingram, sample_rng, sharp_family_table, theorem_b_check};
use crate::linearization::{
    build_jacobians, check_equivariance, check_first_column, cyclic_group, finite_difference_check,
    stabilizer_bruteforce, CMatrix, INVERSE_TOL,
};
use crate::moduli::{
    low_degree_class_from_spectrum, low_degree_coordinates, low_degree_spectrum_from_class, quartic_invariants,
    quartic_relation_residuals, quartic_spectral_data, same_class,
};
use crate::nonarch::{sharpness_prediction, verify_sharpness, Exponent};
use crate::poly_core::field::{rat, Rational, C64};
use crate::poly_core::poly::Poly;
use crate::spectra::{
    cycle_counts, dynatomic_factors, fixed_point_index_sum, fixed_point_relation_residual, multiplier_poly_exact,
    sigma_from_chi,
};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Number of criteria.
pub const CRITERIA: u8 = 10;
/// Runtime limit of criterion 1, in seconds.
pub const CRITERION1_SECONDS: f64 = 120.0;
/// Largest allowed numerical budget in the escape-rate inequalities, relative to `M`.
pub const BUDGET_CAP: f64 = 1e-3;
/// Float tolerance of the holomorphic fixed-point relation.
pub const INDEX_SUM_TOL: f64 = 1e-8;
/// Samples whose fixed multipliers come closer than this to 1 are excluded
/// from the float fixed-point relation.
pub const PARABOLIC_GAP: f64 = 1e-3;
/// Relative tolerance of the complex slope fits.
pub const SLOPE_TOL: f64 = 0.05;

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    /// Criterion number, 1 to 10.
    pub id: u8,
    /// Short title.
    pub title: &'static str,
    /// Whether every check passed.
    pub pass: bool,
    /// Summary of what was checked, and the first failure if any.
    pub detail: String,
    /// Wall-clock time in seconds.
    pub seconds: f64,
}

impl CriterionOutcome {
    /// One line: status, number, title and summary.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {}: {} ({:.1} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

/// Title of a criterion.
pub fn title(id: u8) -> &'static str {
    match id {
        1 => "quartic reconstruction identities",
        2 => "low-degree coordinate roundtrip",
        3 => "holomorphic fixed-point relation",
        4 => "escape-rate lower bounds",
        5 => "exact non-Archimedean sharpness",
        6 => "complex asymptotic slopes",
        7 => "Jacobians at the power map",
        8 => "isospectral compositions",
        9 => "characteristic exponent bounds",
        10 => "structural degrees and factorization",
        _ => "unknown",
    }
}

/// Run one criterion.
pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    let start = Instant::now();
    let result = match id {
        1 => criterion_quartic_identities(seed),
        2 => criterion_low_degree_roundtrip(seed),
        3 => criterion_fixed_point_relation(seed),
        4 => criterion_escape_lower_bounds(seed),
        5 => criterion_sharpness(),
        6 => criterion_slopes(),
        7 => criterion_jacobians(),
        8 => criterion_isospectral(seed),
        9 => criterion_exponent_bounds(seed),
        10 => criterion_structure(seed),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut pass, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    if id == 1 && seconds > CRITERION1_SECONDS {
        pass = false;
        detail.push_str(&format!("; exceeded {CRITERION1_SECONDS} s"));
    }
    CriterionOutcome { id, title: title(id), pass, detail, seconds }
}

/// Run every criterion in order.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    (1..=CRITERIA).map(|id| run_criterion(id, seed)).collect()
}

/// A rational `a/b` with `|a| ≤ max_num` and `1 ≤ b ≤ max_den`.
pub fn random_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.random_range(-max_num..=max_num), rng.random_range(1..=max_den))
}

/// A random rational polynomial of degree exactly `d`.
pub fn random_rational_poly(d: usize, rng: &mut impl Rng) -> Poly<Rational> {
    let mut c: Vec<Rational> = (0..=d).map(|_| random_rational(rng, 9, 6)).collect();
    while c[d].is_zero() {
        c[d] = random_rational(rng, 9, 6);
    }
    Poly::new(c)
}

/// A random rational monic centered polynomial of degree `d`.
pub fn random_monic_centered(d: usize, rng: &mut impl Rng) -> Poly<Rational> {
    let mut c: Vec<Rational> = (0..d - 1).map(|_| random_rational(rng, 9, 6)).collect();
    c.push(Rational::zero());
    c.push(Rational::one());
    Poly::new(c)
}

/// Index range reserved for the samples of one criterion and degree.
fn stream(criterion: u64, d: usize, i: usize) -> u64 {
    criterion * 1_000_000 + d as u64 * 10_000 + i as u64
}

/// Collect the first failure message, if any, from per-sample results.
fn first_failure(results: Vec<Result<Option<String>>>) -> Option<String> {
    results.into_iter().find_map(|r| match r {
        Ok(None) => None,
        Ok(Some(msg)) => Some(msg),
        Err(e) => Some(format!("error: {e}")),
    })
}

fn summarize(checked: String, failure: Option<String>) -> (bool, String) {
    match failure {
        None => (true, checked),
        Some(f) => (false, format!("{checked}; first failure: {f}")),
    }
}

fn criterion_quartic_identities(seed: u64) -> Result<(bool, String)> {
    let n = 100;
    let results: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let f = random_monic_centered(4, &mut sample_rng(seed, stream(1, 4, i)));
            let s1 = sigma_from_chi(&multiplier_poly_exact(&f, 1)?);
            let s2 = sigma_from_chi(&multiplier_poly_exact(&f, 2)?);
            let s = quartic_spectral_data(&s1, &s2)?;
            let inv = quartic_invariants(&f)?;
            let res = quartic_relation_residuals(&inv, &s);
            Ok(res.iter().any(|r| !r.is_zero()).then(|| format!("sample {i} ({f:?}): residuals {res:?}")))
        })
        .collect();
    Ok(summarize(format!("{n} quartics, 5 relations exactly zero"), first_failure(results)))
}

fn criterion_low_degree_roundtrip(seed: u64) -> Result<(bool, String)> {
    let n = 100;
    let jobs: Vec<(usize, usize)> = [2, 3].iter().flat_map(|&d| (0..n).map(move |i| (d, i))).collect();
    let results: Vec<_> = jobs
        .into_par_iter()
        .map(|(d, i)| -> Result<Option<String>> {
            let f = random_monic_centered(d, &mut sample_rng(seed, stream(2, d, i)));
            let sigma = sigma_from_chi(&multiplier_poly_exact(&f, 1)?);
            let coords = low_degree_class_from_spectrum(d, &sigma)?;
            let back = low_degree_spectrum_from_class(d, &coords)?;
            let direct = low_degree_coordinates(&f)?;
            Ok((back != sigma || coords != direct).then(|| format!("d = {d}, sample {i}")))
        })
        .collect();
    Ok(summarize(format!("{n} quadratics and {n} cubics, exact equality"), first_failure(results)))
}

fn criterion_fixed_point_relation(seed: u64) -> Result<(bool, String)> {
    let n = 500;
    let exact: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let d = 2 + i % 5;
            let f = random_rational_poly(d, &mut sample_rng(seed, stream(3, d, i)));
            let r = fixed_point_relation_residual(&f)?;
            Ok((!r.is_zero()).then(|| format!("exact sample {i}: residual {r}")))
        })
        .collect();
    let float: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<(bool, Option<String>)> {
            let d = 2 + i % 5;
            let mut rng = sample_rng(seed, stream(3, 100 + d, i));
            let mut c: Vec<C64> = (0..=d)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let shift = if c[d].re >= 0.0 { 0.5 } else { -0.5 };
            c[d] += Complex64::new(shift, 0.0);
            let (sum, gap) = fixed_point_index_sum(&Poly::new(c))?;
            if gap < PARABOLIC_GAP {
                return Ok((false, None));
            }
            Ok((true, (sum.norm() >= INDEX_SUM_TOL).then(|| format!("float sample {i}: |sum| = {:e}", sum.norm()))))
        })
        .collect();
    let mut used = 0;
    let mut float_fail = None;
    for r in float {
        let (counted, fail) = r?;
        used += counted as usize;
        float_fail = float_fail.or(fail);
    }
    let failure = first_failure(exact).or(float_fail);
    Ok(summarize(
        format!("{n} exact residuals zero; {used}/{n} float samples away from parabolic, |Σ 1/(1−λ)| < {INDEX_SUM_TOL:e}"),
        failure,
    ))
}

/// Sample `i` of degree `d` in the escape-rate sample set: an Ingram-form
/// polynomial with `‖c‖` log-uniform in `[10, 10^4]`.
pub fn escape_sample(seed: u64, d: usize, i: usize) -> Result<Poly<C64>> {
    Ok(random_ingram(d, 10.0, 1e4, &mut sample_rng(seed, stream(4, d, i)))?.1)
}

/// The criterion-4 sample set: 200 Ingram-form polynomials per degree
/// 2..=6 with `‖c‖` log-uniform in `[10, 10^4]`.
pub fn escape_sample_set(seed: u64) -> Result<Vec<(usize, usize, Poly<C64>)>> {
    (2..=6)
        .flat_map(|d| (0..200).map(move |i| (d, i)))
        .map(|(d, i)| Ok((d, i, escape_sample(seed, d, i)?)))
        .collect()
}

fn criterion_escape_lower_bounds(seed: u64) -> Result<(bool, String)> {
    let set = escape_sample_set(seed)?;
    let results: Vec<_> = set
        .par_iter()
        .map(|(d, i, f)| -> Result<(f64, Option<String>)> {
            let r = theorem_b_check(f)?;
            let cap = BUDGET_CAP * r.escape;
            let ok = r.pass && r.budget <= cap;
            let msg = (!ok).then(|| format!("d = {d}, sample {i}: slack {:e}, budget {:e}, cap {cap:e}", r.slack, r.budget));
            Ok((r.slack / r.escape.max(1.0), msg))
        })
        .collect();
    let mut worst = f64::INFINITY;
    let mut failure = None;
    for r in results {
        match r {
            Ok((s, m)) => {
                worst = worst.min(s);
                failure = failure.or(m);
            }
            Err(e) => failure = failure.or(Some(format!("error: {e}"))),
        }
    }
    Ok(summarize(format!("{} samples (d = 2..6), smallest slack/M = {worst:.4}", set.len()), failure))
}

fn criterion_sharpness() -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut failure = None;
    for (kind, d) in [(1u8, 4usize), (1, 5), (2, 4), (2, 5)] {
        let r = verify_sharpness(kind, d)?;
        let got = (r.escape, r.m1.unwrap_or_default(), r.m2.unwrap_or_default());
        parts.push(format!("kind {kind} d = {d}: ({}, {}, {})", got.0, got.1, got.2));
        if !r.pass || r.m1.is_none() || r.m2.is_none() || got != sharpness_prediction(kind, d) {
            failure = failure.or(Some(format!("kind {kind} d = {d}: {r:?}")));
        }
        if (kind, d) == (2, 4) && !r.slopes2.contains(&Exponent::new(9, 8)) {
            failure = failure.or(Some("kind 2 d = 4: period-2 slopes lack 9/8".into()));
        }
    }
    Ok(summarize(parts.join(", "), failure))
}

fn criterion_slopes() -> Result<(bool, String)> {
    let grid = default_t_grid(2, 6);
    let cases = [(1u8, 4usize), (1, 5), (2, 4), (2, 5)];
    let mut worst = 0.0f64;
    let mut failure = None;
    for (kind, d) in cases {
        let (_, slopes) = sharp_family_table(kind, d, &grid)?;
        let exact = sharpness_prediction(kind, d);
        for (got, want) in slopes.iter().zip([exact.0, exact.1, exact.2]) {
            let want = *want.numer() as f64 / *want.denom() as f64;
            let rel = (got - want).abs() / want.abs().max(1.0);
            worst = worst.max(rel);
            if rel > SLOPE_TOL {
                failure = failure.or(Some(format!("kind {kind} d = {d}: slope {got} vs {want}")));
            }
        }
    }
    Ok(summarize(format!("4 families × 3 slopes, largest relative error {worst:.2e}"), failure))
}

fn criterion_jacobians() -> Result<(bool, String)> {
    let mut failure = None;
    let mut fail = |m: String| failure = failure.take().or(Some(m));
    for d in 3..=8 {
        let b = build_jacobians(d)?;
        let n = d - 1;
        let err = (&b.a1 * &b.a1inv - CMatrix::identity(n, n)).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if err > INVERSE_TOL {
            fail(format!("d = {d}: A1·A1inv deviates by {err:e}"));
        }
        let col = check_first_column(&b);
        if !col.distinct || col.max_formula_error > 1e-9 {
            fail(format!("d = {d}: first column {col:?}"));
        }
        if let Err(e) = check_equivariance(&b) {
            fail(format!("d = {d}: {e}"));
        }
        if d <= 5 {
            let fd = finite_difference_check(&b)?;
            if !fd.pass() {
                fail(format!("d = {d}: finite differences {fd:?}"));
            }
            let stab = stabilizer_bruteforce(&b)?;
            if stab != cyclic_group(d) || stab.len() != n {
                fail(format!("d = {d}: stabilizer {stab:?}"));
            }
        }
    }
    Ok(summarize(
        "inverse d = 3..8, first column and equivariance d = 3..8, finite differences and stabilizer orders 2, 3, 4 for d = 3..5"
            .into(),
        failure,
    ))
}

fn criterion_isospectral(seed: u64) -> Result<(bool, String)> {
    let n = 100;
    let results: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let mut rng = sample_rng(seed, stream(8, 2, i));
            let h1 = random_rational_poly(2, &mut rng);
            let h2 = random_rational_poly(2, &mut rng);
            let (a, b) = (h1.compose(&h2), h2.compose(&h1));
            for p in 1..=3 {
                if multiplier_poly_exact(&a, p)? != multiplier_poly_exact(&b, p)? {
                    return Ok(Some(format!("pair {i}, period {p}")));
                }
            }
            Ok(None)
        })
        .collect();
    let mut failure = first_failure(results);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let f = Poly::new(vec![one, zero, zero, zero, one]);
    let g = Poly::new(vec![one, zero, one * 2.0, zero, one]);
    if same_class(&f, &g)? {
        failure = failure.or(Some("z^4+1 and (z^2+1)^2 reported conjugate".into()));
    }
    let fq = Poly::new(vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)]);
    let gq = Poly::new(vec![rat(1, 1), rat(0, 1), rat(2, 1), rat(0, 1), rat(1, 1)]);
    for p in 1..=2 {
        if multiplier_poly_exact(&fq, p)? != multiplier_poly_exact(&gq, p)? {
            failure = failure.or(Some(format!("z^4+1 and (z^2+1)^2 differ at period {p}")));
        }
    }
    Ok(summarize(
        format!("{n} pairs equal for p = 1, 2, 3; z^4+1 and (z^2+1)^2 isospectral for p ≤ 2 but not conjugate"),
        failure,
    ))
}

fn criterion_exponent_bounds(seed: u64) -> Result<(bool, String)> {
    let set = escape_sample_set(seed)?;
    let jobs: Vec<_> = set.iter().flat_map(|s| (1..=3).map(move |p| (s, p))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|((d, i, f), p)| -> Result<Option<String>> {
            let r = appendix_a_check(f, *p)?;
            Ok((!r.pass).then(|| format!("d = {d}, sample {i}, p = {p}: {r:?}")))
        })
        .collect();
    Ok(summarize(format!("{} samples × p = 1..3", set.len()), first_failure(results)))
}

fn criterion_structure(seed: u64) -> Result<(bool, String)> {
    let n = 50;
    let jobs: Vec<(usize, usize)> = (2..=5).flat_map(|d| (0..n).map(move |i| (d, i))).collect();
    let results: Vec<_> = jobs
        .into_par_iter()
        .map(|(d, i)| -> Result<Option<String>> {
            let f = random_rational_poly(d, &mut sample_rng(seed, stream(10, d, i)));
            for p in 1..=3usize {
                let counts = cycle_counts(d as u64, p as u64)?;
                let factors = dynatomic_factors(&f, p)?;
                let phi = &factors.last().expect("p divides p").1;
                if phi.deg() as u64 != counts.nu {
                    return Ok(Some(format!("d = {d}, sample {i}, p = {p}: deg Φ = {}", phi.deg())));
                }
                let product = factors.iter().fold(Poly::one(), |acc, (_, phi)| acc.mul(phi));
                if product != f.iterate(p as u32)?.sub(&Poly::identity()) {
                    return Ok(Some(format!("d = {d}, sample {i}, p = {p}: product of Φ^(k) ≠ f^p − z")));
                }
                let chi = multiplier_poly_exact(&f, p)?;
                if chi.deg() as u64 != counts.n {
                    return Ok(Some(format!("d = {d}, sample {i}, p = {p}: deg χ = {}", chi.deg())));
                }
            }
            Ok(None)
        })
        .collect();
    Ok(summarize(format!("{n} samples per d = 2..5, p = 1..3"), first_failure(results)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let a = random_rational_poly(4, &mut sample_rng(3, 17));
        let b = random_rational_poly(4, &mut sample_rng(3, 17));
        assert_eq!(a, b);
        assert_eq!(a.deg(), 4);
        let m = random_monic_centered(5, &mut sample_rng(3, 18));
        assert!(m.coeff(5).is_one() && m.coeff(4).is_zero());
    }

    #[test]
    fn outcome_lines_name_the_criterion() {
        let o = CriterionOutcome { id: 7, title: title(7), pass: true, detail: "ok".into(), seconds: 0.25 };
        assert_eq!(o.line(), "[PASS] criterion  7 Jacobians at the power map: ok (0.2 s)");
        assert!(!run_criterion(11, 0).pass);
    }
}
