//! The binary against the library.

use std::path::PathBuf;
use std::process::{Command, Output};

use polywitt::cocycle::{solve_cocycles, UniversalCocycle};
use polywitt::{BasedSpace, FieldSpec, WittElement};
use serde_json::Value;

fn polywitt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polywitt")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polywitt-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classical_expressions() {
    let out = polywitt(&["classical", "--p", "2", "--n", "2", "1+1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "coords (0, 1)\nvalue 2\n");
    assert_eq!(stdout(&polywitt(&["classical", "--p", "2", "--n", "1", "V(1)"])), "coords (0, 1)\nvalue 2\n");
    assert_eq!(stdout(&polywitt(&["classical", "--p", "3", "--n", "2", "1 + 1"])), "coords (2, 1)\nvalue 2\n");
    assert_eq!(stdout(&polywitt(&["classical", "--p", "3", "--n", "2", "T(2)"])), "coords (2, 0)\nvalue 8\n");
    assert_eq!(stdout(&polywitt(&["classical", "--p", "3", "--n", "3", "F(V(1)) - 3"])), "coords (0, 0, 0)\nvalue 0\n");
}

#[test]
fn bad_input_is_a_usage_error() {
    assert_eq!(polywitt(&["classical", "--p", "2", "--n", "2", "1 +"]).status.code(), Some(2));
    assert_eq!(polywitt(&["classical", "--p", "7", "--n", "2", "1"]).status.code(), Some(2));
    assert_eq!(polywitt(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(polywitt(&["add", "--in", "/nonexistent/a.json", "/nonexistent/b.json"]).status.code(), Some(2));
}

#[test]
fn oversized_requests_hit_the_cap() {
    let out = polywitt(&["teichmuller", "--p", "2", "--m", "6", "--dim", "3", "--vector", "1,1,1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn teichmuller_and_restrict_match_the_library() {
    let dir = scratch("teich");
    let a = dir.join("a.json");
    let out = polywitt(&["teichmuller", "--p", "2", "--m", "2", "--dim", "2", "--vector", "1,1", "--out", a.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "W^0_2 over dim 2 q=2\n  (0, [s0]) : (1, 0)\n  (0, [s1]) : (1, 0)\n  (1, [s0 s1]) : (1)\n");
    let e = BasedSpace::standard(FieldSpec::prime(2).unwrap(), 2);
    let t = WittElement::teichmuller(&e, 2, &[1, 1]).unwrap();
    assert_eq!(WittElement::from_json(&read(&a)).unwrap(), t);

    let r = dir.join("r.json");
    assert!(polywitt(&["restrict", "--in", a.to_str().unwrap(), "--out", r.to_str().unwrap()]).status.success());
    assert_eq!(WittElement::from_json(&read(&r)).unwrap(), t.restriction().unwrap());

    // V F = p through files
    let fa = dir.join("fa.json");
    let vfa = dir.join("vfa.json");
    assert!(polywitt(&["F", "--in", a.to_str().unwrap(), "--out", fa.to_str().unwrap()]).status.success());
    assert!(polywitt(&["verschiebung", "--in", fa.to_str().unwrap(), "--out", vfa.to_str().unwrap()]).status.success());
    assert_eq!(WittElement::from_json(&read(&vfa)).unwrap(), t.times_p());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn necklace_counts() {
    let out = stdout(&polywitt(&["necklaces", "--b", "2", "--p", "2", "--i", "2"]));
    assert!(out.starts_with("3 necklaces"));
    assert!(out.contains("0001") && out.contains("0011") && out.contains("0111"));
    assert!(stdout(&polywitt(&["necklaces", "--b", "2", "--p", "2", "--i", "0"])).starts_with("2 necklaces"));
    assert!(stdout(&polywitt(&["necklaces", "--b", "2", "--p", "2", "--i", "2", "--all"])).starts_with("6 necklaces"));
}

#[test]
fn cocycle_files_round_trip_and_verify() {
    let dir = scratch("cocycle");
    assert!(polywitt(&["cocycle", "--p", "2", "--depth", "2", "--out", dir.to_str().unwrap()]).status.success());
    let solved = solve_cocycles(2, 2).unwrap();
    let files: Vec<PathBuf> = (1..=2).map(|i| dir.join(format!("c_{i}.json"))).collect();
    for (c, path) in solved.iter().zip(&files) {
        assert_eq!(&UniversalCocycle::from_json(&read(path)).unwrap(), c);
    }
    let args: Vec<&str> = ["cocycle-check", "--in"].into_iter().chain(files.iter().map(|f| f.to_str().unwrap())).collect();
    assert!(polywitt(&args).status.success());

    // a wrong coefficient breaks the level-2 identity
    let mut bad = read(&files[1]);
    let c = bad["terms"][0]["coeff"].as_str().unwrap().parse::<i64>().unwrap();
    bad["terms"][0]["coeff"] = Value::String((c + 1).to_string());
    std::fs::write(&files[1], bad.to_string()).unwrap();
    assert_eq!(polywitt(&args).status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_json_report() {
    let out = polywitt(&["verify", "--suite", "mackey", "--p", "2", "--m", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failures"], 0);
    assert_eq!(v["suite"], "mackey");
    assert!(!v["cases"].as_array().unwrap().is_empty());
}
