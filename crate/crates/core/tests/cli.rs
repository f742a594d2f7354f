use std::path::PathBuf;
use std::process::Command;

use fixsolve::cli::{parse_finite_file, parse_scheme_file};
use fixsolve::fixtures;
use serde_json::Value as Json;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn fixsolve(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fixsolve"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

fn json(args: &[&str]) -> (i32, Json) {
    let (code, out, err) = fixsolve(args);
    if out.is_empty() {
        return (code, Json::Null);
    }
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}"));
    (code, v)
}

#[test]
fn solve_max_min_text() {
    let (code, out, _) = fixsolve(&["solve", &path("max_min.eq")]);
    assert_eq!(code, 0);
    assert!(out.contains("y1 = 2\ny2 = 2\ny3 = 3\n"), "{out}");
    assert!(out.contains("status: completed"));
}

#[test]
fn solve_json_schema() {
    let keys = [
        "assignment",
        "evals",
        "narrow_apps",
        "solver",
        "status",
        "vars",
        "widen_apps",
    ];
    for solver in ["tsrr", "tstp", "tsmp", "warrow"] {
        let (code, v) = json(&["solve", &path("max_min.eq"), "-s", solver, "--json"]);
        assert_eq!(code, 0, "{solver}");
        let obj = v.as_object().unwrap();
        assert_eq!(obj.keys().map(String::as_str).collect::<Vec<_>>(), keys);
        assert_eq!(obj["solver"], solver);
        assert_eq!(obj["status"], "completed");
        let names: Vec<&String> = obj["assignment"].as_object().unwrap().keys().collect();
        assert!(names.windows(2).all(|w| w[0] < w[1]));
    }
    let (_, v) = json(&["solve", &path("max_min.eq"), "--json"]);
    assert_eq!(v["assignment"]["y1"], "2");
    let (_, v) = json(&["solve", &path("max_min.eq"), "-s", "tstp", "--json"]);
    assert_eq!(v["assignment"]["y1"], "inf");
}

#[test]
fn oscillating_exit_codes() {
    let (code, v) = json(&["solve", &path("oscillating.eq"), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["assignment"]["y1"], "1");
    assert_eq!(v["evals"], 2);
    let (code, v) = json(&[
        "solve",
        &path("oscillating.eq"),
        "-s",
        "warrow",
        "--fuel",
        "1000",
        "--json",
    ]);
    assert_eq!(code, 3);
    assert_eq!(v["status"], "fuel_exhausted");
    assert_eq!(v["evals"], 1000);
}

#[test]
fn compare_buckets_add_up() {
    for (name, _) in fixtures::EQUATION_FILES.iter().chain(&fixtures::SCHEME_FILES[..2]) {
        for (a, b) in [("tsmp", "tstp"), ("tsrr", "tsmp"), ("tstp", "warrow")] {
            let (code, v) = json(&["compare", &path(name), a, b, "--json", "--fuel", "10000"]);
            if code != 0 {
                continue;
            }
            let sum: u64 = ["equal", "a_more_precise", "b_more_precise", "incomparable"]
                .iter()
                .map(|k| v[k].as_u64().unwrap())
                .sum();
            assert_eq!(sum, v["shared_vars"].as_u64().unwrap(), "{name} {a} {b}");
        }
    }
    let (code, v) = json(&["compare", &path("max_min.eq"), "tsmp", "tstp", "--json"]);
    assert_eq!(code, 0);
    assert_eq!((v["equal"].as_u64(), v["a_more_precise"].as_u64()), (Some(2), Some(1)));
}

#[test]
fn check_stratified() {
    let (code, out, _) = fixsolve(&["check-stratified", &path("two_call.scheme")]);
    assert_eq!((code, out.trim()), (0, "u:1 v:0"));
    let (code, out, _) = fixsolve(&["check-stratified", &path("recursive.scheme")]);
    assert_eq!(code, 1);
    assert!(out.contains("cycle u -> u"), "{out}");
    let (code, _, err) = fixsolve(&["check-stratified", &path("max_min.eq")]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn verify_runs() {
    let (code, out, _) = fixsolve(&["verify", &path("monotone_toy.eq"), "-s", "tsrr"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAIL"));
    for solver in ["tsrr", "tstp", "tsmp"] {
        let (code, out, _) = fixsolve(&["verify", &path("oscillating_chain4.eq"), "-s", solver]);
        assert_eq!(code, 0, "{solver}: {out}");
    }
    let (code, _, _) = fixsolve(&["verify", &path("max_min.eq")]);
    assert_eq!(code, 2);
}

#[test]
fn scheme_solve_reports_contexts() {
    let (code, out, _) = fixsolve(&["solve", &path("two_call.scheme")]);
    assert_eq!(code, 0);
    assert!(out.contains("contexts per point: u:1 v:2"), "{out}");
    let (code, v) = json(&["solve", &path("two_call.scheme"), "--json", "--start", "v:3"]);
    assert_eq!(code, 0);
    assert_eq!(v["assignment"]["<v,3>"], "10");
}

#[test]
fn variable_budget_exit_code() {
    let (code, _, err) = fixsolve(&["solve", &path("recursive.scheme"), "--var-budget", "200"]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(fixsolve(&["solve", "/no/such/file.eq"]).0, 2);
    assert_eq!(fixsolve(&["solve", &path("max_min.eq"), "-s", "nope"]).0, 2);
    assert_eq!(fixsolve(&["frobnicate"]).0, 2);
    let dir = std::env::temp_dir().join(format!("fixsolve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.eq");
    std::fs::write(&bad, "lattice natinf\nvar x = frob 1\n").unwrap();
    let (code, _, err) = fixsolve(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2, column 9"), "{err}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn files_round_trip() {
    for (name, text) in fixtures::EQUATION_FILES {
        let sys = parse_finite_file(text).unwrap();
        assert_eq!(parse_finite_file(&sys.to_string()).unwrap(), sys, "{name}");
    }
    for (name, text) in fixtures::SCHEME_FILES {
        let s = parse_scheme_file(text).unwrap();
        assert_eq!(parse_scheme_file(&s.to_string()).unwrap(), s, "{name}");
    }
}
