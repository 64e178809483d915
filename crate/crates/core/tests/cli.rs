use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freevol"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    assert_eq!(v["schema"], "freevol/1");
    (out.status.code().unwrap(), v)
}

const SPLITTING: &str = "tests/data/splitting_ac_b.json";
const SIXTH: &str = "tests/data/pair_sixth_power.json";
const SAME: &str = "tests/data/pair_identical.json";
const FILLING: &str = "tests/data/pair_filling.json";

#[test]
fn fold_outputs() {
    let out = run(&["fold", "-k", "3", "abbc", "cababbc", "--dot"]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 7);
    let (code, v) = json(&["fold", "-k", "2", "a", "a"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["num_vertices"], 1);
    assert_eq!(v["result"]["edges"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["fold", "-k", "2", ""]).status.code(), Some(64));
    assert_eq!(run(&["fold", "-k", "2", "ac"]).status.code(), Some(64));
    assert_eq!(run(&["volume", "--splitting", "missing.json", "a"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn volume_examples() {
    for (word, expected) in [("aCCbc", 2), ("c", 0), ("cababbc", 4)] {
        let (code, v) = json(&["volume", "--splitting", SPLITTING, word]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["free_volume"], expected, "{word}");
    }
    let out = run(&["volume", "--splitting", SPLITTING, "aCCbc", "--dot"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("color=red"));
}

#[test]
fn fill_exit_codes() {
    let (code, v) = json(&["fill", "--pair", SIXTH]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["f2"]["holds"], true);
    assert_eq!(v["result"]["f3"]["holds"], false);
    assert_eq!(v["result"]["verdict"], "unknown");
    assert_eq!(json(&["fill", "--pair", SAME]).0, 1);
    let (code, v) = json(&["fill", "--pair", FILLING]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["fills"], true);
}

#[test]
fn pingpong_exit_codes() {
    let (code, v) = json(&["pingpong", "gen", "--pair", FILLING, "--word", "1:+N 2:+N"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["fully_irreducible_hyperbolic"], true);
    assert_eq!(v["result"]["n"], 77);
    let (code, v) = json(&["pingpong", "gen", "--pair", FILLING, "--word", "1:+N"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["conjugate_to_twist_power"], true);
    let (code, _) = json(&["pingpong", "gen", "--pair", FILLING, "--word", "1:+1 2:+N"]);
    assert_eq!(code, 3);
    assert_eq!(run(&["pingpong", "gen", "--pair", FILLING, "--word", "1:N 1:N"]).status.code(), Some(64));
    let (_, v) = json(&["pingpong", "classify", "--pair", SIXTH, "c"]);
    assert_eq!(v["result"]["side"], "X1");
}

#[test]
fn other_subcommands() {
    let (code, v) = json(&["whitehead", "-k", "2", "abAB"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["holds"], true);
    assert_eq!(json(&["whitehead", "-k", "3", "a", "b"]).0, 1);
    let (_, v) = json(&["constants", "--pair", FILLING]);
    assert_eq!(v["result"][0]["c"], 107);
    let (code, v) = json(&["theoremb", "--pair", FILLING, "-n", "3", "ab"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["checks"].as_array().unwrap().len(), 2);
    assert_eq!(run(&["theoremb", "--pair", FILLING, "-n", "3", "a", "b", "c"]).status.code(), Some(3));
    let (_, v) = json(&["sample", "--pair", SIXTH, "--trials", "20", "--max-len", "8"]);
    assert_eq!(v["result"]["zero_sums"], 0);
    let (code, v) = json(&["pingpong", "orbits", "--pair", FILLING, "--word", "1:+N 2:+N", "--max-len", "4", "--max-power", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["violation_count"], 0);
    let (code, _) = json(&["pingpong", "lemma", "--pair", FILLING, "--trials", "2", "--max-len", "5"]);
    assert_eq!(code, 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["sample", "--pair", SIXTH, "--trials", "30", "--seed", "7", "--json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["fill", "--pair", SIXTH, "--json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
