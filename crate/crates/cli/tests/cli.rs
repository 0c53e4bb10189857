use std::process::{Command, Output};

use serde_json::Value;

fn unitfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitfield"))
        .args(args)
        .env_remove("UNITFIELD_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn horo_pq_bending_is_five() {
    let out = unitfield(&["field", "bending", "--family", "horo-pq", "--p", "1", "--q", "0", "--point", "0,0,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["tool"], "unitfield");
    let sample = &doc["payload"]["samples"][0];
    assert_eq!(sample["bending"].as_f64().unwrap(), 5.0);
    assert!((sample["bending_fd"].as_f64().unwrap() - 5.0).abs() < 1e-6);
}

#[test]
fn thresholds_document() {
    let out = unitfield(&["stability", "thresholds", "--tol", "1e-6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let p = &json(&out)["payload"];
    assert!((p["delta_s"].as_f64().unwrap() - 1.471007).abs() < 5e-6);
    assert!((p["delta_u"].as_f64().unwrap() - 1.612195).abs() < 5e-6);
}

#[test]
fn r0_reported_below_bound() {
    let out = unitfield(&["stability", "r0", "--delta0", "1.471008"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r0 = json(&out)["payload"]["r0"]["r0"].as_f64().unwrap();
    assert!(r0 <= 8.198206 && r0 > 8.0, "{r0}");
}

#[test]
fn rotated_theta_fails_with_exit_two() {
    let out = unitfield(&["check", "harmonic", "--family", "horo-theta", "--rotate", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["payload"]["verdict"], "FAIL");
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("FAIL"));
}

#[test]
fn harmonic_family_passes() {
    let out = unitfield(&["check", "reduced", "--family", "euclid-pendulum", "--q", "1", "--p", "0.3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let p = &json(&out)["payload"];
    assert_eq!(p["verdict"], "PASS");
    for key in ["family", "params", "grid", "h", "channels"] {
        assert!(!p[key].is_null(), "missing {key}");
    }
}

#[test]
fn usage_errors_exit_one_before_computing() {
    for args in [
        &["field", "eval", "--family", "nope", "--point", "1,0,0"][..],
        &["field", "eval", "--family", "h-parallel", "--q", "1", "--point", "0,0,1"],
        &["field", "eval", "--family", "euclid-pendulum", "--point", "1,0,0"],
        &["field", "eval", "--family", "horo-theta", "--point", "1,0"],
        &["field", "eval", "--family", "horo-theta", "--point", "1,0,1", "--chart", "spherical"],
        &["field", "eval", "--bogus"],
        &["stability", "hessian"],
        &["repro", "all", "--only", "99"],
    ] {
        let out = unitfield(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_two() {
    // on the axis the radial field is undefined
    let out = unitfield(&["field", "eval", "--family", "euclid-radial-line", "--point", "0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn help_lists_families() {
    for sub in [
        &["field", "eval"][..],
        &["field", "bending"],
        &["check", "harmonic"],
        &["check", "reduced"],
        &["check", "map"],
        &["flow", "trace"],
        &["flow", "diagnose"],
    ] {
        let mut args = sub.to_vec();
        args.push("--help");
        let out = unitfield(&args);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        for family in ["euclid-radial-line", "euclid-pendulum", "horo-holomorphic", "h-parallel"] {
            assert!(text.contains(family), "{sub:?} help lacks {family}");
        }
    }
}

#[test]
fn deterministic_payloads_are_byte_identical() {
    let args = ["pendulum", "solve", "--q", "2", "--n", "50", "--deterministic"];
    let a = unitfield(&args);
    let b = unitfield(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["timestamp"].is_null());
    let c = unitfield(&args[..args.len() - 1]);
    assert!(json(&c)["timestamp"].is_string());
}

#[test]
fn csv_has_header_and_round_trips() {
    let out = unitfield(&["pendulum", "solve", "--q", "1", "--n", "7", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,v,v_prime,bending"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    // v_1(2) = π/2 exactly
    let doc = json(&unitfield(&["pendulum", "solve", "--q", "1", "--r-min", "1", "--r-max", "2", "--n", "2"]));
    let v = doc["payload"]["solution"]["samples"][1]["v"].as_f64().unwrap();
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    let first = &rows[0];
    assert!((first[0] - 1e-3).abs() < 1e-18);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_unitfield"))
        .args(["stability", "hessian", "--r", "1", "--delta", "1", "--format", "csv"])
        .env("UNITFIELD_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("stability-hessian.csv")).unwrap();
    assert!(text.starts_with("r,delta,closed_form,"));
    let out = Command::new(env!("CARGO_BIN_EXE_unitfield"))
        .args(["stability", "thresholds", "-o", "sub/t.json", "--deterministic"])
        .env("UNITFIELD_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sub/t.json")).unwrap()).unwrap();
    assert!(doc["payload"]["delta_s"].is_number());
}

#[test]
fn flow_trace_and_diagnose() {
    let out = unitfield(&[
        "flow", "trace", "--family", "euclid-pendulum", "--q", "1", "--start", "0,0,-1", "--n", "10", "--step", "0.1",
        "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("s,x,y,z"));
    assert_eq!(text.lines().count(), 12);
    let out = unitfield(&[
        "flow", "diagnose", "--family", "euclid-pendulum", "--q", "1", "--start", "0.1,0,0", "--n", "20000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let p = &json(&out)["payload"];
    let crossings = p["crossings"].as_array().unwrap();
    assert_eq!(crossings.len(), 1);
    assert!((crossings[0]["radius"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    let out = unitfield(&[
        "flow", "diagnose", "--family", "euclid-pendulum", "--q", "-1", "--p", "1.5707963267948966", "--radii", "0.5,3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = &json(&out)["payload"]["slope_profile"];
    // reflected and reversed: left-handed upward inside, right-handed downward outside
    assert_eq!(s[0]["chirality"], "left");
    assert_eq!(s[0]["vertical"], "up");
    assert_eq!(s[1]["chirality"], "right");
    assert_eq!(s[1]["vertical"], "down");
}

#[test]
fn repro_single_row_table() {
    let out = unitfield(&["repro", "all", "--only", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS 1"), "{text}");
    let out = unitfield(&["repro", "all", "--only", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["payload"][0]["passed"], false);
}
