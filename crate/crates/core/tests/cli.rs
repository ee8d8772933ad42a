use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn freepd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freepd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().unwrap_or("")).expect("JSON diagnostic")
}

#[test]
fn haagerup_extend_params_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    let ext = dir.path().join("ext.json");
    let params = dir.path().join("params.json");
    let again = dir.path().join("again.json");
    let trace = dir.path().join("trace.json");

    let out = freepd(&["haagerup", "--m", "2", "--t", "0.5", "--to", "1", "-o", p(&base)]);
    assert!(out.status.success());
    let out = freepd(&["extend", "-i", p(&base), "--to", "3", "--central", "-o", p(&ext), "--trace", p(&trace)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(doc["schema"], "trace.v1");

    let out = freepd(&["params", "-i", p(&ext), "--from", "1", "-o", p(&params)]);
    assert!(out.status.success());
    let out = freepd(&["extend", "-i", p(&base), "--to", "3", "--params", p(&params), "-o", p(&again)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&ext).unwrap(), fs::read(&again).unwrap());

    let out = freepd(&["verify", "-i", p(&ext)]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["is_pd"], true);
    assert_eq!(report["radius"], 3);

    let out = freepd(&["check-ortho", "-i", p(&ext), "--n", "2"]);
    assert!(out.status.success());
}

#[test]
fn random_extension_round_trips_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    let ext = dir.path().join("ext.json");
    let params = dir.path().join("params.json");
    let again = dir.path().join("again.json");
    freepd(&["haagerup", "--m", "2", "--k", "2", "--t", "0.3", "--to", "2", "-o", p(&base)]);
    let out = freepd(&["extend", "-i", p(&base), "--to", "3", "--seed", "7", "--radius", "0.8", "-o", p(&ext)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(freepd(&["params", "-i", p(&ext), "--from", "2", "-o", p(&params)]).status.success());
    assert!(freepd(&["extend", "-i", p(&base), "--to", "3", "--params", p(&params), "-o", p(&again)])
        .status
        .success());
    let a = freepd::json::pdfun_from_str(&fs::read_to_string(&ext).unwrap()).unwrap();
    let b = freepd::json::pdfun_from_str(&fs::read_to_string(&again).unwrap()).unwrap();
    assert!(a.max_diff(&b).unwrap() < 1e-10);
}

#[test]
fn letter_order_is_recorded_and_followed() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    let ext = dir.path().join("ext.json");
    freepd(&["haagerup", "--m", "2", "--t", "0.5", "--to", "1", "-o", p(&base)]);
    let out = freepd(&["extend", "-i", p(&base), "--to", "2", "--order", "-2,1,2,-1", "-o", p(&ext)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&ext).unwrap()).unwrap();
    assert_eq!(doc["letter_order"], serde_json::json!([-2, 1, 2, -1]));
}

#[test]
fn non_pd_input_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"m":1,"k":1,"domain":{"type":"ball","n":2},"entries":[
            {"word":[],"value":[[[1.0,0.0]]]},
            {"word":[1],"value":[[[0.9,0.0]]]},
            {"word":[1,1],"value":[[[-0.9,0.0]]]}]}"#,
    )
    .unwrap();
    let out = freepd(&["verify", "-i", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let diag = stderr_json(&out);
    assert_eq!(diag["kind"], "not_positive_definite");
    assert!(diag["details"]["min_eigenvalue"].as_f64().unwrap() < 0.0);
    assert!(diag["details"]["witness"].is_array());

    let out = freepd(&["extend", "-i", p(&bad), "--to", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "not_psd");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{\"m\": 2,").unwrap();
    let out = freepd(&["verify", "-i", p(&junk)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["kind"], "json");

    let out = freepd(&["verify", "-i", p(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));

    // missing class value
    let gap = dir.path().join("gap.json");
    fs::write(
        &gap,
        r#"{"m":2,"k":1,"domain":{"type":"ball","n":1},"entries":[
            {"word":[],"value":[[[1.0,0.0]]]},
            {"word":[1],"value":[[[0.5,0.0]]]}]}"#,
    )
    .unwrap();
    let out = freepd(&["verify", "-i", p(&gap)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["kind"], "missing_value");

    let out = freepd(&["haagerup", "--m", "2", "--t", "-1", "--to", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = freepd(&["extend", "--to", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn factor_and_sample() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    let cert = dir.path().join("cert.json");
    fs::write(
        &good,
        r#"{"m":1,"c":1,"terms":[
            {"word":[],"value":[[[2.0,0.0]]]},
            {"word":[1],"value":[[[1.0,0.0]]]},
            {"word":[-1],"value":[[[1.0,0.0]]]}]}"#,
    )
    .unwrap();
    fs::write(
        &bad,
        r#"{"m":1,"c":1,"terms":[
            {"word":[1],"value":[[[1.0,0.0]]]},
            {"word":[-1],"value":[[[1.0,0.0]]]}]}"#,
    )
    .unwrap();

    let out = freepd(&["factor", "-i", p(&good), "-o", p(&cert)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(doc["residual"].as_f64().unwrap() <= 1e-8);

    let out = freepd(&["factor", "-i", p(&bad), "--max-iter", "3000"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "no_certificate");

    let out = freepd(&["sample", "-i", p(&bad), "--trials", "50"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["min_eigenvalue"].as_f64().unwrap() <= -0.5);
}

#[test]
fn radialize_command() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    let ext = dir.path().join("ext.json");
    freepd(&["haagerup", "--m", "2", "--t", "0.5", "--to", "1", "-o", p(&base)]);
    freepd(&["extend", "-i", p(&base), "--to", "2", "--seed", "3", "-o", p(&ext)]);
    let out = freepd(&["radialize", "-i", p(&ext)]);
    assert!(out.status.success());
    let phi = freepd::json::pdfun_from_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let tol = freepd::Tolerance::default();
    assert!(freepd::pdfun::verify_pd(&phi, &tol).unwrap().is_pd);
}
