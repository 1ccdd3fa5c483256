use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn polygraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polygraph")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = polygraph(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn classes(report: &serde_json::Value) -> Vec<u64> {
    report["result"]["dimensions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["classes"].as_u64().unwrap())
        .collect()
}

#[test]
fn free_counts() {
    assert_eq!(classes(&json(&["free", &data("theta2.cptd")])), vec![1, 1, 1]);
    assert_eq!(classes(&json(&["free", &data("loop.cptd"), "--bound", "3"]))[1], 4);
    assert_eq!(classes(&json(&["free", &data("scalar.cptd"), "--bound", "2"]))[2], 6);
}

#[test]
fn reports_carry_schema_and_bounds() {
    let r = json(&["free", &data("scalar.cptd"), "--bound", "2"]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["bounds"]["size"], 2);
    assert_eq!(r["result"]["dimensions"][2]["partial"], true);
}

#[test]
fn slices_match_their_oracles() {
    for (k, n, want) in [("1", "2", vec![1, 2, 4, 8]), ("2", "2", vec![1, 2, 3, 4]), ("1", "0", vec![1, 0, 0, 0])] {
        let r = json(&["slice", k, n]);
        let counts: Vec<u64> = r["result"]["counts_by_size"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert_eq!(counts, want);
        assert_eq!(r["result"]["matches_oracle"], true);
    }
    let out = polygraph(&["slice", "2", "2"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("MATCH"));
}

#[test]
fn regularity_verdicts() {
    for (file, label) in [
        ("monoid.thy", "STRONGLY-REGULAR"),
        ("commutative-monoid.thy", "NOT-STRONGLY-REGULAR"),
        ("gray-slice2.thy", "STRONGLY-REGULAR"),
    ] {
        let r = json(&["regular", &data(file)]);
        assert_eq!(r["result"]["label"], label, "{file}");
    }
    let r = json(&["regular", &data("commutative-monoid.thy")]);
    assert_eq!(r["result"]["verdict"]["witness"]["kind"], "Permutation");
}

#[test]
fn gates() {
    let one = json(&["gate", "1"]);
    assert_eq!(one["result"]["verdict"], "PASS-WITHIN-BOUNDS");
    let three = json(&["gate", "3"]);
    assert_eq!(three["result"]["verdict"], "COUNTEREXAMPLE");
    assert_eq!(three["result"]["witness"]["first"], "{(a,a),(b,b)}");
    assert_eq!(three["result"]["oracle_replay"], true);
    let bad = polygraph(&["gate", "5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn two_computads_pass_the_gate() {
    let two = json(&["gate", "2"]);
    assert_eq!(two["result"]["verdict"], "PASS-WITHIN-BOUNDS");
    assert_eq!(two["result"]["failures"], 0);
}

#[test]
fn identical_runs_give_identical_reports() {
    let args = ["gate", "1", "--seed", "11", "--format", "json"];
    assert_eq!(polygraph(&args).stdout, polygraph(&args).stdout);
    let args = ["free", &data("scalar.cptd"), "--format", "json"];
    assert_eq!(polygraph(&args).stdout, polygraph(&args).stdout);
}

#[test]
fn trees_and_eval() {
    let r = json(&["trees", "--height", "1", "--width", "3"]);
    assert_eq!(r["result"]["count"], 4);
    let e = json(&["eval", &data("scalar.cptd"), "comp0(alpha,beta)", "comp1(beta,alpha)", "--bound", "2"]);
    assert_eq!(e["result"]["verdict"], "equal");
    assert_eq!(e["result"]["certificate_replayed"], true);
}

#[test]
fn input_errors_exit_with_one() {
    let missing = polygraph(&["free", "/nonexistent.cptd"]);
    assert_eq!(missing.status.code(), Some(1));
    let dir = std::env::temp_dir().join("polygraph-cli-test.cptd");
    std::fs::write(&dir, "dim 1\ngen 0 a\ngen 1 f : a -> b\n").unwrap();
    let bad = polygraph(&["free", dir.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    let term = polygraph(&["eval", &data("scalar.cptd"), "comp0(alpha"]);
    assert_eq!(term.status.code(), Some(1));
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join("polygraph-cli-out.json");
    let out = polygraph(&["trees", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"schema_version\": 1"));
}
