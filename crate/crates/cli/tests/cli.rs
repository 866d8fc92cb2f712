mod common;

use std::fs;

use common::{latsym, latsym_env};
use serde_json::json;

#[test]
fn verify_heat_b_evolutionary_passes() {
    let r = latsym(&["verify", "--scheme", "heat", "--symmetry", "B", "--mode", "evolutionary"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["result"]["verdict"], "pass");
    assert!(v["result"]["samples_tested"].as_u64().unwrap() >= 50);
}

#[test]
fn nonlinear_characteristic_fails_with_exit_two() {
    let r = latsym(&["verify", "--scheme", "heat", "--symmetry", "u^2", "--mode", "evolutionary"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["result"]["verdict"], "fail");
}

#[test]
fn isospectral_flow_commutes_to_second_order() {
    let r = latsym(&["verify", "--scheme", "dttl", "--symmetry", "isospectral"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert!(v["result"]["estimate"]["order"].as_f64().unwrap() >= 1.9);
}

#[test]
fn nonisospectral_flow_does_not_commute() {
    let r = latsym(&["verify", "--scheme", "dttl", "--symmetry", "nonisospectral"]);
    assert_eq!(r.code, 2);
}

#[test]
fn translation_reduction_exponent_is_ln_two() {
    let r = latsym(&["reduce", "--scheme", "heat", "--symmetry", "translation", "--mode", "point", "--k", "1", "--c", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    let alpha_a = v["result"]["values"]["alpha_A"][0].as_f64().unwrap();
    assert!((alpha_a - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn dilation_reduction_is_exact() {
    let r = latsym(&["reduce", "--scheme", "heat", "--symmetry", "dilation", "--mode", "evolutionary", "--c", "1", "--gamma0", "1", "--n", "3", "--m", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let values = &r.json()["result"]["values"];
    assert_eq!(values["N"], 8);
    assert_eq!(values["gamma_n"], "8");
    assert_eq!(values["I"], "0");
    assert_eq!(values["v"], "0");
    let r = latsym(&["reduce", "--scheme", "heat", "--symmetry", "dilation", "--mode", "evolutionary", "--c", "1", "--n", "3", "--m", "-4"]);
    let values = &r.json()["result"]["values"];
    // N = 4: z^3 coefficient of q(z)^3 at c = 1, times gamma_3 = 8.
    assert_eq!(values["I"], "-4");
    assert_eq!(values["v"], "-32");
}

#[test]
fn nonisospectral_reduction_selects_vacuum() {
    let r = latsym(&["reduce", "--scheme", "dttl", "--symmetry", "nonisospectral"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let values = &r.json()["result"]["values"];
    assert_eq!(values["A(m)"], "m(m+1)");
    assert_eq!(values["B"], 0);
    assert_eq!(values["a"], 1);
    assert_eq!(values["b"], 0);
}

#[test]
fn family_check_with_negative_first_integral_sets_the_verdict() {
    let base = ["reduce", "--scheme", "dttl", "--symmetry", "nonisospectral", "--A", "-3/2", "--B", "3/7"];
    let printed = latsym(&[&base[..], &["--form", "printed"]].concat());
    assert_eq!(printed.code, 2, "{}", printed.stderr);
    let check = &printed.json()["result"]["values"]["family_check"];
    assert!(["recurrence_residual", "flow_residual_a", "flow_residual_b"].iter().any(|k| check[*k] != "0"));
    let corrected = latsym(&[&base[..], &["--form", "corrected"]].concat());
    assert_eq!(corrected.code, 0, "{}", corrected.stderr);
    assert_eq!(corrected.json()["result"]["values"]["family_check"]["A"], "-3/2");
}

#[test]
fn oracle_examples() {
    for (args, value) in [
        (["oracle", "I", "--N", "1", "--n", "3", "--c", "1"], "1/8"),
        (["oracle", "I", "--N", "0", "--n", "5", "--c", "2"], "0"),
        (["oracle", "I", "--N", "7", "--n", "3", "--c", "1"], "1"),
    ] {
        let r = latsym(&args);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(r.json()["result"]["value"], value, "{args:?}");
    }
}

#[test]
fn oracle_quadrature_check_is_reported() {
    let r = latsym(&["oracle", "I", "--N", "4", "--n", "5", "--c", "1/2", "--check"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let q = &r.json()["result"]["quadrature"];
    assert!(q["deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["verify", "--scheme", "wave"],
        vec!["verify", "--no-such-flag"],
        vec!["verify", "--symmetry", "u +* 2", "--mode", "evolutionary"],
        vec!["oracle", "I", "--c", "-1"],
        vec!["reduce", "--format", "csv"],
        vec!["frobnicate"],
    ] {
        let r = latsym(&args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stderr);
        assert!(r.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn parse_errors_carry_a_span() {
    let r = latsym(&["verify", "--symmetry", "u(1,0) + * 2", "--mode", "evolutionary"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains('^') || r.stderr.contains("column") || r.stderr.contains(".."), "{}", r.stderr);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(latsym(&["--help"]).code, 0);
    assert_eq!(latsym(&["--version"]).code, 0);
    assert_eq!(latsym(&["verify", "--help"]).code, 0);
}

#[test]
fn effective_config_is_echoed_with_defaults() {
    let v = latsym(&["oracle", "gamma", "--n", "2"]).json();
    let cfg = &v["config"];
    assert_eq!(cfg["command"], "oracle");
    assert_eq!(cfg["seed"], 0);
    assert_eq!(cfg["n"], 2);
    assert_eq!(cfg["c"], "1/2");
    assert_eq!(cfg["arithmetic"], "double");
    assert_eq!(cfg["oracle"], "gamma");
    assert_eq!(v["result"]["value"], "9/4");
}

#[test]
fn flags_override_config_file_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("run.conf");
    fs::write(&kv, "# oracle settings\nc = 1\nn = 4\nseed = 7\n").unwrap();
    let toml = dir.path().join("run.toml");
    fs::write(&toml, "c = \"1\"\nn = 4\nseed = 7\n").unwrap();
    for file in [&kv, &toml] {
        let path = file.to_str().unwrap();
        let v = latsym(&["oracle", "gamma", "--config", path, "--n", "2"]).json();
        assert_eq!(v["config"]["c"], "1", "file beats default");
        assert_eq!(v["config"]["n"], 2, "flag beats file");
        assert_eq!(v["config"]["seed"], 7);
        assert_eq!(v["config"]["config_file"], path);
        assert_eq!(v["result"]["value"], "4");
    }
}

#[test]
fn bad_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.conf");
    fs::write(&f, "colour = blue\n").unwrap();
    let r = latsym(&["oracle", "gamma", "--config", f.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("colour"), "{}", r.stderr);
    assert_eq!(latsym(&["oracle", "gamma", "--config", "/nonexistent/x.conf"]).code, 1);
}

#[test]
fn arithmetic_from_environment() {
    let args = ["verify", "--scheme", "heat", "--symmetry", "B", "--mode", "evolutionary", "--samples", "3"];
    let r = latsym_env(&args, &[("LATSYM_MODE", "rational")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["config"]["arithmetic"], "rational");
    assert_eq!(v["result"]["arithmetic_mode"], "rational");
    assert_eq!(v["result"]["max_abs_residual"], 0.0);
    let mut flagged = args.to_vec();
    flagged.extend(["--arithmetic", "double"]);
    let v = latsym_env(&flagged, &[("LATSYM_MODE", "rational")]).json();
    assert_eq!(v["config"]["arithmetic"], "double", "flag beats environment");
    assert_eq!(latsym_env(&args, &[("LATSYM_MODE", "quad")]).code, 1);
}

#[test]
fn output_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    fs::write(&out, "stale").unwrap();
    let r = latsym(&["oracle", "q", "--c", "1", "--n", "2", "--output", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["coefficients"].as_array().unwrap().len(), 5);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 1, "{leftovers:?}");
    let r = latsym(&["oracle", "q", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(r.code, 1);
}

#[test]
fn fixed_seed_gives_identical_bytes() {
    for args in [
        vec!["verify", "--scheme", "dttl", "--symmetry", "P1", "--seed", "11"],
        vec!["verify", "--scheme", "dttl", "--symmetry", "isospectral", "--seed", "3"],
        vec!["evolve", "--scheme", "heat", "--seed", "5"],
        vec!["report"],
    ] {
        let a = latsym(&args);
        let b = latsym(&args);
        assert_eq!(a.code, b.code);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = latsym(&["evolve", "--scheme", "heat", "--seed", "1"]).stdout;
    let b = latsym(&["evolve", "--scheme", "heat", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn evolve_round_trips_through_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let r = latsym(&["evolve", "--scheme", "heat", "--width", "12", "--steps", "0", "--format", "csv", "--output", csv.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# "));
    let r = latsym(&["evolve", "--scheme", "heat", "--input", csv.to_str().unwrap(), "--steps", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["result"]["field"]["grid"]["time_range"], json!([0, 4]));
    assert!(v["result"]["scheme_residual"].as_f64().unwrap() < 1e-12);
    let js = dir.path().join("u.json");
    fs::write(&js, serde_json::to_string(&v["result"]["field"]).unwrap()).unwrap();
    let r = latsym(&["evolve", "--scheme", "heat", "--input", js.to_str().unwrap(), "--steps", "1"]);
    assert_eq!(r.code, 1, "multi-row input is rejected: {}", r.stderr);
}

#[test]
fn evolve_ab_state_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("ab.json");
    fs::write(&f, r#"{"m": 0, "support_lo": 0, "support_hi": 1, "a": ["3/2", "2/3"], "b": ["1/5", "-1/5"]}"#).unwrap();
    let r = latsym(&["evolve", "--scheme", "dttl", "--input", f.to_str().unwrap(), "--steps", "2", "--arithmetic", "rational"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["result"]["states"].as_array().unwrap().len(), 3);
    for step in v["result"]["steps"].as_array().unwrap() {
        assert_eq!(step["residual_a"], "0");
        assert_eq!(step["residual_b"], "0");
    }
}

#[test]
fn report_runs_the_suite_and_summarises_files() {
    let r = latsym(&["report"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = r.json();
    assert_eq!(v["result"]["source"], "suite");
    assert_eq!(v["result"]["passed"], v["result"]["total"]);
    let dir = tempfile::tempdir().unwrap();
    let pass = dir.path().join("pass.json");
    let fail = dir.path().join("fail.json");
    latsym(&["verify", "--scheme", "heat", "--symmetry", "P0", "--output", pass.to_str().unwrap()]);
    latsym(&["verify", "--scheme", "heat", "--symmetry", "u^2", "--mode", "evolutionary", "--output", fail.to_str().unwrap()]);
    let r = latsym(&["report", pass.to_str().unwrap(), fail.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!(v["result"]["passed"], 1);
    assert_eq!(v["result"]["total"], 2);
}
