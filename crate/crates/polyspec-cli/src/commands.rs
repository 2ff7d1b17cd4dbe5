//! Subcommand implementations. Each handler writes its report and returns a
//! verdict.

use std::io::Write;

use polyspec::acceptance::{self, escape_sample, CRITERIA};
use polyspec::escape::{
    appendix_a_check, char_exponents, default_t_grid, escape_rates, sharp_family_table, theorem_b_check,
};
use polyspec::linearization::{
    build_jacobians, check_equivariance, check_first_column, cyclic_group, finite_difference_check, matrix_to_json,
    stabilizer_bruteforce, CMatrix, INVERSE_TOL, MAX_STABILIZER_DEGREE,
};
use polyspec::moduli::{
    compose_pair, ingram_form, low_degree_class_from_spectrum, low_degree_coordinates, quartic_forward,
    quartic_invariants, quartic_reconstruct, quartic_reconstruct_exact, quartic_representative, same_class,
    to_monic_centered_exact, to_monic_centered_float, NormalFormRecord, QuarticInvariants,
};
use polyspec::nonarch::{
    nonarch_char_exponent, nonarch_escape, series_from_json, series_poly_from_json, sharpness_prediction,
    verify_sharpness, Exponent,
};
use polyspec::poly_core::json::{poly_to_json, rational_from_json};
use polyspec::poly_core::{
    format_rational, multiset_match, parse_rational, rational_roots, AnyPoly, Field, Poly,
    Rational, C64, DEFAULT_MATCH_TOL,
};
use polyspec::spectra::{
    multiplier_poly_exact, multiplier_poly_float, sigma_from_chi, spectrum_float,
};
use polyspec::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::format::{array, number, poly_text, read_json, read_poly, ScalarJson};
use crate::{Backend, Cli, CliError, Command, Form, SampleArgs, Verdict};

type Outcome = Result<Verdict, CliError>;

/// Run the parsed command, writing its report to `out`.
pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let seed = cli.config.seed;
    match &cli.command {
        Command::Spectrum { poly, period, degree, backend } => spectrum(out, poly, *period, *degree, *backend),
        Command::Normalize { poly, form } => normalize(out, poly, *form),
        Command::Invariants { poly } => invariants(out, poly),
        Command::Reconstruct { degree, sigma } => reconstruct(out, *degree, sigma),
        Command::IsospectralPair { h1, h2, max_period } => isospectral_pair(out, h1, h2, *max_period),
        Command::Escape { poly, series, critical, max_period } => match (poly, series) {
            (Some(p), None) => escape(out, p, *max_period),
            (None, Some(s)) => escape_series(out, s, critical.as_deref().unwrap_or("[]"), *max_period),
            _ => Err(CliError::Usage("escape needs exactly one of --poly and --series".into())),
        },
        Command::CheckTheoremB(args) => check_theorem_b(out, args, seed),
        Command::CheckAppendixA { samples, max_period } => check_appendix_a(out, samples, *max_period, seed),
        Command::SharpFamily { kind, degree, t_grid, summary } => {
            sharp_family(out, *kind, *degree, t_grid.as_deref(), summary.as_deref())
        }
        Command::VerifySharpness { kind, degree, json } => verify(out, *kind, *degree, *json),
        Command::Jacobians { degree } => jacobians(out, *degree),
        Command::Reproduce { criteria } => reproduce(out, criteria.as_deref(), seed),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("JSON values serialize"))?;
    Ok(())
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn degree_of<R: polyspec::poly_core::Ring>(f: &Poly<R>) -> Result<usize, CliError> {
    match f.degree() {
        Some(d) if d >= 2 => Ok(d),
        _ => Err(CliError::Usage("the polynomial must have degree at least 2".into())),
    }
}

fn spectrum(out: &mut dyn Write, poly: &str, p: usize, degree: Option<usize>, backend: Option<Backend>) -> Outcome {
    if p == 0 {
        return Err(CliError::Usage("the period must be positive".into()));
    }
    let f = read_poly(poly)?;
    let backend = backend.unwrap_or(match f {
        AnyPoly::Exact(_) => Backend::Exact,
        AnyPoly::Float(_) => Backend::Float,
    });
    let report = match backend {
        Backend::Exact => {
            let f = f.to_exact()?;
            let d = check_degree(degree_of(&f)?, degree)?;
            let chi = multiplier_poly_exact(&f, p)?;
            let roots = if chi.deg() == 0 { Vec::new() } else { rational_roots(&chi)? };
            json!({
                "backend": "exact",
                "degree": d,
                "period": p,
                "chi": array(chi.coeffs()),
                "chi_text": poly_text(chi.coeffs(), "λ"),
                "roots": array(&roots),
                "sigma": array(&sigma_from_chi(&chi)),
            })
        }
        Backend::Float => {
            let f = f.to_float();
            let d = check_degree(degree_of(&f)?, degree)?;
            let chi = multiplier_poly_float(&f, p)?;
            let roots = spectrum_float(&f, p)?.values;
            json!({
                "backend": "float",
                "degree": d,
                "period": p,
                "chi": array(chi.coeffs()),
                "roots": array(&roots),
                "sigma": array(&sigma_from_chi(&chi)),
            })
        }
    };
    emit(out, &report)?;
    Ok(Verdict::Pass)
}

fn check_degree(actual: usize, expected: Option<usize>) -> Result<usize, CliError> {
    match expected {
        Some(d) if d != actual => Err(CliError::Usage(format!("--degree {d} but the polynomial has degree {actual}"))),
        _ => Ok(actual),
    }
}

fn record_json<F: Field + ScalarJson>(rec: &NormalFormRecord<F>, wrap: impl Fn(Poly<F>) -> AnyPoly) -> Value {
    json!({
        "form": format!("{:?}", rec.form),
        "poly": poly_to_json(&wrap(rec.poly.clone())),
        "alpha": rec.alpha.to_json(),
        "beta": rec.beta.to_json(),
    })
}

fn with_backend(mut v: Value, backend: &str) -> Value {
    v["backend"] = json!(backend);
    v
}

fn normalize(out: &mut dyn Write, poly: &str, form: Form) -> Outcome {
    let f = read_poly(poly)?;
    let report = match (form, &f) {
        (Form::MonicCentered, AnyPoly::Exact(p)) => {
            degree_of(p)?;
            match to_monic_centered_exact(p) {
                Ok(rec) => with_backend(record_json(&rec, AnyPoly::Exact), "exact"),
                // The leading coefficient has no rational root of the needed order.
                Err(Error::RootUnavailable(_)) => {
                    with_backend(record_json(&to_monic_centered_float(&f.to_float())?, AnyPoly::Float), "float")
                }
                Err(e) => return Err(e.into()),
            }
        }
        (Form::MonicCentered, AnyPoly::Float(p)) => {
            degree_of(p)?;
            with_backend(record_json(&to_monic_centered_float(p)?, AnyPoly::Float), "float")
        }
        (Form::Ingram, _) => {
            let p = f.to_float();
            degree_of(&p)?;
            let (rec, crit) = ingram_form(&p)?;
            let mut v = with_backend(record_json(&rec, AnyPoly::Float), "float");
            v["critical_points"] = array(&crit);
            v
        }
    };
    emit(out, &report)?;
    Ok(Verdict::Pass)
}

fn invariants_of<F: Field + ScalarJson>(f: &Poly<F>) -> Result<Value, CliError> {
    match f.deg() {
        2 | 3 => Ok(json!({ "degree": f.deg(), "coordinates": array(&low_degree_coordinates(f)?) })),
        4 => {
            let inv = quartic_invariants(f)?;
            Ok(json!({
                "degree": 4,
                "invariants": quartic_json(&inv),
                "spectral_data": array(&quartic_forward(&inv)),
            }))
        }
        d => Err(CliError::Usage(format!("invariants are available for degrees 2 to 4, got {d}"))),
    }
}

fn quartic_json<F: ScalarJson>(inv: &QuarticInvariants<F>) -> Value {
    json!({
        "alpha": inv.alpha.to_json(),
        "beta": inv.beta.to_json(),
        "gamma": inv.gamma.to_json(),
        "delta": inv.delta.to_json(),
    })
}

fn invariants(out: &mut dyn Write, poly: &str) -> Outcome {
    let f = read_poly(poly)?;
    let mut report = match &f {
        AnyPoly::Exact(p) => {
            degree_of(p)?;
            match to_monic_centered_exact(p) {
                Ok(rec) => {
                    let mut v = invariants_of(&rec.poly)?;
                    v["backend"] = json!("exact");
                    v
                }
                // The leading coefficient has no rational root of the needed order.
                Err(Error::RootUnavailable(_)) => float_invariants(&f.to_float())?,
                Err(e) => return Err(e.into()),
            }
        }
        AnyPoly::Float(p) => float_invariants(p)?,
    };
    report["normal_form"] = match &report["backend"] {
        Value::String(s) if s == "exact" => poly_to_json(&AnyPoly::Exact(to_monic_centered_exact(&f.to_exact()?)?.poly)),
        _ => poly_to_json(&AnyPoly::Float(to_monic_centered_float(&f.to_float())?.poly)),
    };
    emit(out, &report)?;
    Ok(Verdict::Pass)
}

fn float_invariants(p: &Poly<C64>) -> Result<Value, CliError> {
    degree_of(p)?;
    let mut v = invariants_of(&to_monic_centered_float(p)?.poly)?;
    v["backend"] = json!("float");
    Ok(v)
}

fn reconstruct(out: &mut dyn Write, d: usize, sigma: &str) -> Outcome {
    let v = read_json(sigma)?;
    let items = v.as_array().ok_or_else(|| CliError::Usage("--sigma must be a JSON array".into()))?;
    let exact: Option<Vec<Rational>> = items.iter().map(|x| rational_from_json(x).ok()).collect();
    let report = match (d, exact) {
        (2 | 3, Some(s)) => json!({ "degree": d, "backend": "exact", "coordinates": array(&low_degree_class_from_spectrum(d, &s)?) }),
        (2 | 3, None) => {
            let s = float_values(items)?;
            json!({ "degree": d, "backend": "float", "coordinates": array(&low_degree_class_from_spectrum(d, &s)?) })
        }
        (4, Some(s)) => {
            let s: [Rational; 4] = s.try_into().map_err(|_| CliError::Usage("degree 4 needs [s1, s2, s4, t2]".into()))?;
            let classes = quartic_reconstruct_exact(&s)?;
            let list: Vec<Value> = classes
                .iter()
                .map(|inv| {
                    let float = QuarticInvariants {
                        alpha: to_c64(&inv.alpha),
                        beta: to_c64(&inv.beta),
                        gamma: to_c64(&inv.gamma),
                        delta: to_c64(&inv.delta),
                    };
                    json!({
                        "invariants": quartic_json(inv),
                        "representative": poly_to_json(&AnyPoly::Float(quartic_representative(&float))),
                    })
                })
                .collect();
            json!({ "degree": 4, "backend": "exact", "classes": list })
        }
        (4, None) => {
            let s: [C64; 4] = float_values(items)?
                .try_into()
                .map_err(|_| CliError::Usage("degree 4 needs [s1, s2, s4, t2]".into()))?;
            let list: Vec<Value> = quartic_reconstruct(&s)?
                .iter()
                .map(|inv| {
                    json!({
                        "invariants": quartic_json(inv),
                        "representative": poly_to_json(&AnyPoly::Float(quartic_representative(inv))),
                    })
                })
                .collect();
            json!({ "degree": 4, "backend": "float", "classes": list })
        }
        _ => return Err(CliError::Usage(format!("reconstruction is available for degrees 2 to 4, got {d}"))),
    };
    emit(out, &report)?;
    Ok(Verdict::Pass)
}

fn to_c64(q: &Rational) -> C64 {
    C64::new(polyspec::poly_core::rational_to_f64(q), 0.0)
}

fn float_values(items: &[Value]) -> Result<Vec<C64>, CliError> {
    Ok(items
        .iter()
        .map(polyspec::poly_core::json::complex_from_json)
        .collect::<Result<Vec<_>, _>>()?)
}

fn isospectral_pair(out: &mut dyn Write, h1: &str, h2: &str, max_period: usize) -> Outcome {
    let (a, b) = (read_poly(h1)?, read_poly(h2)?);
    let mut periods = Vec::new();
    let mut equal = true;
    let (f1, f2) = match (&a, &b) {
        (AnyPoly::Exact(a), AnyPoly::Exact(b)) => {
            let (f1, f2) = compose_pair(a, b)?;
            for p in 1..=max_period {
                let (c1, c2) = (multiplier_poly_exact(&f1, p)?, multiplier_poly_exact(&f2, p)?);
                equal &= c1 == c2;
                periods.push(json!({ "period": p, "equal": c1 == c2, "chi": array(c1.coeffs()) }));
            }
            (AnyPoly::Exact(f1), AnyPoly::Exact(f2))
        }
        _ => {
            let (f1, f2) = compose_pair(&a.to_float(), &b.to_float())?;
            for p in 1..=max_period {
                let m = multiset_match(&spectrum_float(&f1, p)?.values, &spectrum_float(&f2, p)?.values, DEFAULT_MATCH_TOL)?;
                equal &= m.matched;
                periods.push(json!({ "period": p, "equal": m.matched, "max_distance": number(m.max_distance) }));
            }
            (AnyPoly::Float(f1), AnyPoly::Float(f2))
        }
    };
    let same = same_class(&f1.to_float(), &f2.to_float())?;
    emit(
        out,
        &json!({
            "h1_after_h2": poly_to_json(&f1),
            "h2_after_h1": poly_to_json(&f2),
            "same_class": same,
            "spectra_equal": equal,
            "periods": periods,
        }),
    )?;
    Ok(verdict(equal))
}

fn escape(out: &mut dyn Write, poly: &str, max_period: usize) -> Outcome {
    let f = read_poly(poly)?.to_float();
    degree_of(&f)?;
    let rates = escape_rates(&f)?;
    let critical: Vec<Value> = rates
        .per_critical
        .iter()
        .map(|(c, g)| json!({ "point": c.to_json(), "green": number(g.value), "error": number(g.error), "escaped": g.escaped }))
        .collect();
    let mut exponents = Vec::new();
    for p in 1..=max_period {
        let ex = char_exponents(&f, p)?;
        exponents.push(json!({ "period": p, "max": number(ex.max), "min": number(ex.min) }));
    }
    emit(
        out,
        &json!({
            "escape_max": number(rates.max),
            "escape_min": number(rates.min),
            "error": number(rates.error()),
            "critical": critical,
            "exponents": exponents,
        }),
    )?;
    Ok(Verdict::Pass)
}

fn exponent_json(e: &Exponent) -> Value {
    Value::String(e.to_string())
}

fn escape_series(out: &mut dyn Write, series: &str, critical: &str, max_period: usize) -> Outcome {
    let f = series_poly_from_json(&read_json(series)?)?;
    let d = degree_of(&f)?;
    let crit_json = read_json(critical)?;
    let crit = crit_json
        .as_array()
        .ok_or_else(|| CliError::Usage("--critical must be a list of series".into()))?
        .iter()
        .map(series_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    let m = nonarch_escape(&crit, d)?;
    let mut exponents = Vec::new();
    for p in 1..=max_period {
        let ex = nonarch_char_exponent(&f, p)?;
        exponents.push(json!({
            "period": p,
            "max": ex.max.as_ref().map(exponent_json),
            "slopes": ex.slopes.iter().map(exponent_json).collect::<Vec<_>>(),
            "zero_multipliers": ex.zero_multipliers,
        }));
    }
    emit(out, &json!({ "degree": d, "escape_max": exponent_json(&m), "exponents": exponents }))?;
    Ok(Verdict::Pass)
}

/// The polynomials a sampling command checks, keyed by `(degree, index)`.
fn sample_set(args: &SampleArgs, seed: u64) -> Result<Vec<(usize, usize, Poly<C64>)>, CliError> {
    if let Some(p) = &args.poly {
        let f = read_poly(p)?.to_float();
        return Ok(vec![(degree_of(&f)?, 0, f)]);
    }
    if let Some(&d) = args.degree.iter().find(|&&d| d < 2) {
        return Err(CliError::Usage(format!("sample degrees must be at least 2, got {d}")));
    }
    args.degree
        .iter()
        .flat_map(|&d| (0..args.samples).map(move |i| (d, i)))
        .map(|(d, i)| Ok((d, i, escape_sample(seed, d, i)?)))
        .collect()
}

/// Evaluate `check` on every sample in parallel and report per-sample rows in
/// sample order.
fn run_samples(
    out: &mut dyn Write,
    name: &str,
    args: &SampleArgs,
    seed: u64,
    check: impl Fn(&Poly<C64>) -> Result<(bool, Value), Error> + Sync,
) -> Outcome {
    let set = sample_set(args, seed)?;
    let rows: Vec<(bool, Value)> = set
        .par_iter()
        .map(|(d, i, f)| {
            let (pass, mut row) = check(f).unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
            row["degree"] = json!(d);
            row["index"] = json!(i);
            row["pass"] = json!(pass);
            (pass, row)
        })
        .collect();
    let failed = rows.iter().filter(|r| !r.0).count();
    let report = json!({
        "check": name,
        "seed": if args.poly.is_some() { Value::Null } else { json!(seed) },
        "samples": rows.len(),
        "failed": failed,
        "results": rows.into_iter().map(|r| r.1).collect::<Vec<_>>(),
    });
    emit(out, &report)?;
    Ok(verdict(failed == 0))
}

fn check_theorem_b(out: &mut dyn Write, args: &SampleArgs, seed: u64) -> Outcome {
    run_samples(out, "theorem-b", args, seed, |f| {
        let r = theorem_b_check(f)?;
        Ok((
            r.pass,
            json!({
                "escape": number(r.escape),
                "m1": number(r.m1),
                "m2": r.m2.map(number),
                "slack": number(r.slack),
                "budget": number(r.budget),
            }),
        ))
    })
}

fn check_appendix_a(out: &mut dyn Write, args: &SampleArgs, max_period: usize, seed: u64) -> Outcome {
    if max_period == 0 {
        return Err(CliError::Usage("--max-period must be positive".into()));
    }
    run_samples(out, "appendix-a", args, seed, |f| {
        let mut pass = true;
        let mut periods = Vec::new();
        for p in 1..=max_period {
            let r = appendix_a_check(f, p)?;
            pass &= r.pass;
            periods.push(json!({
                "period": p,
                "upper_slack": number(r.upper_slack),
                "lower_slack": r.lower_slack.map(number),
                "budget": number(r.budget),
                "pass": r.pass,
            }));
        }
        Ok((pass, json!({ "periods": periods })))
    })
}

fn sharp_family(
    out: &mut dyn Write,
    kind: u8,
    d: usize,
    grid: Option<&[String]>,
    summary_path: Option<&std::path::Path>,
) -> Outcome {
    let grid = match grid {
        Some(values) => values.iter().map(|s| parse_rational(s.trim())).collect::<Result<Vec<_>, _>>()?,
        None => default_t_grid(2, 6),
    };
    let (samples, slopes) = sharp_family_table(kind, d, &grid)?;
    writeln!(out, "# sharp family kind={kind} degree={d}")?;
    writeln!(out, "t,M,M1,M2")?;
    for s in &samples {
        writeln!(out, "{},{},{},{}", format_rational(&s.t), s.escape, s.m1, s.m2)?;
    }
    let (m, m1, m2) = sharpness_prediction(kind, d);
    let summary = json!({
        "kind": kind,
        "degree": d,
        "grid": samples.iter().map(|s| format_rational(&s.t)).collect::<Vec<_>>(),
        "slopes": { "M": number(slopes[0]), "M1": number(slopes[1]), "M2": number(slopes[2]) },
        "exact": { "M": exponent_json(&m), "M1": exponent_json(&m1), "M2": exponent_json(&m2) },
    });
    match summary_path {
        Some(path) => std::fs::write(path, serde_json::to_string_pretty(&summary).expect("JSON values serialize"))?,
        None => writeln!(out, "# summary {summary}")?,
    }
    Ok(Verdict::Pass)
}

fn verify(out: &mut dyn Write, kind: u8, d: usize, as_json: bool) -> Outcome {
    let r = verify_sharpness(kind, d)?;
    let show = |e: &Option<Exponent>| e.map_or_else(|| "-inf".to_string(), |e| e.to_string());
    let (em, em1, em2) = r.expected;
    if as_json {
        emit(
            out,
            &json!({
                "kind": kind,
                "degree": d,
                "M": exponent_json(&r.escape),
                "M1": r.m1.as_ref().map(exponent_json),
                "M2": r.m2.as_ref().map(exponent_json),
                "expected": [exponent_json(&em), exponent_json(&em1), exponent_json(&em2)],
                "slopes2": r.slopes2.iter().map(exponent_json).collect::<Vec<_>>(),
                "ingram_form": r.ingram_form,
                "pass": r.pass,
            }),
        )?;
    } else {
        writeln!(
            out,
            "kind {kind} degree {d}: (M, M1, M2) = ({}, {}, {}); expected ({em}, {em1}, {em2}): {}",
            r.escape,
            show(&r.m1),
            show(&r.m2),
            if r.pass { "PASS" } else { "FAIL" }
        )?;
    }
    Ok(verdict(r.pass))
}

fn jacobians(out: &mut dyn Write, d: usize) -> Outcome {
    let b = build_jacobians(d)?;
    let n = d - 1;
    let inverse_residual = (&b.a1 * &b.a1inv - CMatrix::identity(n, n)).iter().map(|x| x.norm()).fold(0.0, f64::max);
    let first = check_first_column(&b);
    let fd = finite_difference_check(&b)?;
    let (equivariance, equivariance_pass) = match check_equivariance(&b) {
        Ok(r) => (serde_json::to_value(&r).expect("report serializes"), true),
        Err(e) => (json!({ "error": e.to_string() }), false),
    };
    let (stabilizer, stabilizer_pass) = if d <= MAX_STABILIZER_DEGREE {
        let found = stabilizer_bruteforce(&b)?;
        let pass = found == cyclic_group(d);
        (json!({ "permutations": found, "order": found.len(), "cyclic": pass }), pass)
    } else {
        (Value::Null, true)
    };
    let pass = inverse_residual <= INVERSE_TOL && first.distinct && fd.pass() && equivariance_pass && stabilizer_pass;
    emit(
        out,
        &json!({
            "degree": d,
            "a1": matrix_to_json(&b.a1),
            "a1_inverse": matrix_to_json(&b.a1inv),
            "a2": matrix_to_json(&b.a2),
            "a": matrix_to_json(&b.a),
            "cycle_exponents": b.rep_exponents,
            "checks": {
                "inverse_residual": number(inverse_residual),
                "first_column": first,
                "finite_difference": { "a1_error": number(fd.a1_error), "a2_error": number(fd.a2_error), "pass": fd.pass() },
                "equivariance": equivariance,
                "stabilizer": stabilizer,
                "pass": pass,
            },
        }),
    )?;
    Ok(verdict(pass))
}

fn reproduce(out: &mut dyn Write, criteria: Option<&[u8]>, seed: u64) -> Outcome {
    let ids: Vec<u8> = criteria.map_or_else(|| (1..=CRITERIA).collect(), <[u8]>::to_vec);
    if let Some(bad) = ids.iter().find(|&&id| id == 0 || id > CRITERIA) {
        return Err(CliError::Usage(format!("criteria are numbered 1 to {CRITERIA}, got {bad}")));
    }
    writeln!(out, "# acceptance suite, seed {seed}")?;
    let mut passed = 0;
    for &id in &ids {
        let outcome = acceptance::run_criterion(id, seed);
        passed += usize::from(outcome.pass);
        writeln!(out, "{}", outcome.line())?;
        out.flush()?;
    }
    writeln!(out, "{passed}/{} criteria passed", ids.len())?;
    Ok(verdict(passed == ids.len()))
}

#[cfg(test)]
mod tests {
    fn run(cmd: &str) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("polyspec").chain(cmd.split(' '));
        let code = crate::run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn degree_mismatch_is_usage_error() {
        assert_eq!(run("spectrum --poly [0,0,1] --degree 3").0, crate::EXIT_USAGE);
    }

    #[test]
    fn reproduce_rejects_unknown_criterion() {
        assert_eq!(run("reproduce --criteria 11").0, crate::EXIT_USAGE);
    }
}
