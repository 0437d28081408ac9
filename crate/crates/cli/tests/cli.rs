use std::process::{Command, Output};

use serde_json::Value;

fn cylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylab"))
        .args(args)
        .env_remove("CYLAB_STEP_LIMIT")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn report_n3_pipeline() {
    let v = json_of(&cylab(&["report", "--n", "3", "--seed", "7"]));
    assert_eq!(v["hodge_row"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(v["higgs"]["hodge_row"], v["hodge_row"]);
    assert_eq!(v["higgs"]["yukawa_length"], 1);
    assert_eq!(v["higgs"]["maximal"], true);
    assert_eq!(v["resolution"]["status"], "ran");
    assert_eq!(v["resolution"]["discrepancy"], 0);
    assert_eq!(v["resolution"]["exceptional_count"], 50);
    assert_eq!(v["resolution"]["final_max_f"], serde_json::json!([0, 0, 0]));
    assert_eq!(v["seed"], 7);
}

#[test]
fn report_is_byte_identical() {
    let a = cylab(&["report", "--n", "5", "--seed", "3"]);
    let b = cylab(&["report", "--n", "5", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = cylab(&["report", "--n", "5", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn report_n7_skips_resolution() {
    let v = json_of(&cylab(&["report", "--n", "7"]));
    assert_eq!(v["w_unif"], false);
    assert_eq!(v["resolution"]["status"], "skipped");
    assert!(v["resolution"]["notice"]
        .as_str()
        .unwrap()
        .contains("skipped"));
}

#[test]
fn even_n_is_a_usage_error() {
    let out = cylab(&["report", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("n must be odd ≥ 3"));
}

#[test]
fn missing_argument_is_a_usage_error() {
    assert_eq!(cylab(&["hodge"]).status.code(), Some(2));
}

#[test]
fn gamma_example() {
    let v = json_of(&cylab(&["gamma", "--n", "3", "--t", "2,3,5"]));
    assert_eq!(v["s"], serde_json::json!(["-5/3", "-5", "5"]));
    assert_eq!(v["inverse"], serde_json::json!(["2", "3", "5"]));
}

#[test]
fn gamma_rejects_collisions() {
    let out = cylab(&["gamma", "--n", "3", "--t", "2,2,5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kummer_smooth() {
    let v = json_of(&cylab(&["kummer", "--n", "3", "--s", "2,3,5"]));
    assert_eq!(v["smooth"], true);
    assert_eq!(v["equations"][0]["exponent"], 3);
    assert_eq!(v["groups"]["order_g1"], 243);
    // for n = 3 every admissible point is in general position
    let v = json_of(&cylab(&["kummer", "--n", "3", "--s", "2,-1/2,5"]));
    assert_eq!(v["smooth"], true);
    assert_eq!(v["general_position"], true);
}

#[test]
fn hodge_and_higgs() {
    let v = json_of(&cylab(&["hodge", "--n", "9"]));
    assert_eq!(v["w_unif"], true);
    assert_eq!(v["phi_r"], 2);
    let v = json_of(&cylab(&["higgs", "--n", "5"]));
    assert_eq!(v["yukawa_length"], 1);
    assert_eq!(v["assumptions"].as_array().unwrap().len(), 1);
}

#[test]
fn resolve_k3_with_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = cylab(&[
        "resolve",
        "--n",
        "2",
        "--m",
        "6",
        "--r",
        "2",
        "--dot",
        dir.path().to_str().unwrap(),
    ]);
    let v = json_of(&out);
    assert_eq!(v["exceptional_count"], 15);
    assert_eq!(v["discrepancy"], 0);
    let steps = v["steps"].as_array().unwrap().len();
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(files, steps + 1);
}

#[test]
fn step_limit_flag_and_env() {
    let out = cylab(&["resolve", "--n", "3", "--step-limit", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step limit 5"));
    let out = Command::new(env!("CARGO_BIN_EXE_cylab"))
        .args(["resolve", "--n", "3"])
        .env("CYLAB_STEP_LIMIT", "7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step limit 7"));
}

#[test]
fn resolve_from_arrangement_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let general = r#"{"n":3,"m":6,"columns":[["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"],["1","1","1","1"],["1","2","3","5"]]}"#;
    std::fs::write(&path, general).unwrap();
    let v = json_of(&cylab(&[
        "resolve",
        "--arrangement",
        path.to_str().unwrap(),
    ]));
    assert_eq!(v["exceptional_count"], 50);

    let degenerate = general.replace(r#"["1","2","3","5"]"#, r#"["1","1","1","5"]"#);
    std::fs::write(&path, degenerate).unwrap();
    let out = cylab(&["resolve", "--arrangement", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_quick_passes() {
    let out = cylab(&["selftest", "--quick"]);
    let v = json_of(&out);
    assert_eq!(v["all_passed"], true);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["detail"] == "skipped (--quick)"));
}
