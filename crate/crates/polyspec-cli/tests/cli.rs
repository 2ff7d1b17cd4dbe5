//! End-to-end tests of the `polyspec` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn polyspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyspec")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_sharpness_kind1_degree4() {
    let out = polyspec(&["verify-sharpness", "--kind", "1", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(1, 0, 3/2)"), "{text}");
    assert!(text.contains("PASS"));
}

#[test]
fn spectrum_of_z_squared() {
    let out = polyspec(&["spectrum", "--poly", "[0,0,1]", "--period", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["chi"], serde_json::json!(["0", "-2", "1"]));
    assert_eq!(v["chi_text"], "λ^2 - 2λ");
    assert_eq!(v["sigma"], serde_json::json!(["2", "0"]));
}

#[test]
fn spectrum_float_backend_matches_exact() {
    let out = polyspec(&["spectrum", "--poly", "[0,0,1]", "--period", "2", "--backend", "float"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0][0].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(polyspec(&["spectrum", "--poly", "[0,0,1]", "--bogus"]).status.code(), Some(2));
    assert_eq!(polyspec(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(polyspec(&["spectrum", "--poly", "[0,0,"]).status.code(), Some(2));
    assert_eq!(polyspec(&["spectrum", "--poly", "[\"1/0\",0,1]"]).status.code(), Some(2));
    assert_eq!(polyspec(&["verify-sharpness", "--kind", "3", "--degree", "4"]).status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let out = polyspec(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("reproduce"));
}

#[test]
fn invalid_thread_count_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_polyspec"))
        .args(["jacobians", "--degree", "3"])
        .env("POLYSPEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jacobians_pass_their_checks() {
    let out = polyspec(&["jacobians", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["checks"]["pass"], true);
    assert_eq!(v["checks"]["stabilizer"]["order"], 3);
    assert_eq!(v["a1"].as_array().unwrap().len(), 3);
}

#[test]
fn normalize_and_invariants_of_a_quartic() {
    let out = polyspec(&["normalize", "--poly", "[1,0,0,4,2]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["form"], "MonicCentered");
    // 2 has no rational cube root, so the conjugacy is computed in floats.
    assert_eq!(v["backend"], "float");

    let out = polyspec(&["normalize", "--poly", "[1,0,3,0,1]"]);
    assert_eq!(json_of(&out)["poly"], serde_json::json!(["1", "0", "3", "0", "1"]));

    let out = polyspec(&["invariants", "--poly", "[\"1/2\",3,-1,0,1]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["backend"], "exact");
    // α = a_1, β = a_0^3, γ = a_2^3, δ = a_0 a_2.
    assert_eq!(v["invariants"]["alpha"], "3");
    assert_eq!(v["invariants"]["beta"], "1/8");
    assert_eq!(v["invariants"]["gamma"], "-1");
    assert_eq!(v["invariants"]["delta"], "-1/2");
}

#[test]
fn reconstruct_quadratic_from_sigma() {
    // z^2 + c has σ = (2, 4c).
    let out = polyspec(&["reconstruct", "--degree", "2", "--sigma", "[2, \"-3\"]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["coordinates"], serde_json::json!(["-3/4"]));
}

#[test]
fn invariants_roundtrip_through_reconstruct() {
    let out = polyspec(&["invariants", "--poly", "[\"1/3\",\"-2\",\"5/7\",0,1]"]);
    let s = json_of(&out)["spectral_data"].to_string();
    let out = polyspec(&["reconstruct", "--degree", "4", "--sigma", &s]);
    assert_eq!(out.status.code(), Some(0));
    let classes = json_of(&out)["classes"].as_array().unwrap().clone();
    assert!(classes.iter().any(|c| c["invariants"]["alpha"] == "-2" && c["invariants"]["delta"] == "5/21"));
}

#[test]
fn isospectral_pair_in_different_classes() {
    let out = polyspec(&["isospectral-pair", "--h1", "[1,0,1]", "--h2", "[0,0,1]", "--max-period", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["spectra_equal"], true);
    assert_eq!(v["same_class"], false);
}

#[test]
fn escape_rates_of_a_quadratic() {
    // z^2 + 100: g(0) = g(100)/2 and g(100) = log 100 + (1/2) log(1 + 100/100^2) + O(1e-7).
    let out = polyspec(&["escape", "--poly", "[100,0,1]", "--max-period", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let m = v["escape_max"].as_f64().unwrap();
    let expected = (100f64.ln() + 0.5 * 1.01f64.ln()) / 2.0;
    assert!((m - expected).abs() < 1e-6, "{m} vs {expected}");
    assert_eq!(v["exponents"].as_array().unwrap().len(), 2);
}

#[test]
fn escape_over_series_field() {
    // Kind 2, d = 4 sharp family: f = z^2 (z − t)^2 / 4 with critical points 0, t, t/2.
    let t = "[[1, 1]]";
    let series = "[[], [], [[2, \"1/4\"]], [[1, \"-1/2\"]], [[0, \"1/4\"]]]".to_string();
    let critical = format!("[[], {t}, [[1, \"1/2\"]]]");
    let out = polyspec(&["escape", "--series", &series, "--critical", &critical, "--max-period", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["escape_max"], "1");
    assert_eq!(v["exponents"][0]["max"], "3/2");
    assert_eq!(v["exponents"][1]["max"], "3/2");
}

#[test]
fn theorem_b_sampling_is_seeded_and_deterministic() {
    let args = ["check-theorem-b", "--degree", "2,3", "--samples", "3", "--seed", "7"];
    let a = polyspec(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_polyspec")).args(args).env("POLYSPEC_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["samples"], 6);
    assert_eq!(v["failed"], 0);
    let c = polyspec(&["check-theorem-b", "--degree", "2,3", "--samples", "3", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn appendix_a_on_one_polynomial() {
    let out = polyspec(&["check-appendix-a", "--poly", "[[30,5],0,0,1]", "--max-period", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["seed"], Value::Null);
    assert_eq!(v["results"][0]["periods"].as_array().unwrap().len(), 2);
}

#[test]
fn sharp_family_csv_and_summary() {
    let dir = std::env::temp_dir().join(format!("polyspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let summary = dir.join("summary.json");
    let csv = dir.join("table.csv");
    let out = polyspec(&[
        "sharp-family",
        "--kind",
        "2",
        "--degree",
        "4",
        "--t-grid",
        "100,1000,10000,100000",
        "--summary",
        summary.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let table = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,M,M1,M2");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("100,"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["exact"]["M1"], "3/2");
    let slope = s["slopes"]["M1"].as_f64().unwrap();
    assert!((slope - 1.5).abs() < 0.075, "{slope}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reproduce_single_criterion() {
    let out = polyspec(&["reproduce", "--criteria", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# acceptance suite, seed "));
    assert!(text.contains("[PASS] criterion  7"));
    assert!(text.trim_end().ends_with("1/1 criteria passed"));
}
