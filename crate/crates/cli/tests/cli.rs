use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moebiuslab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn catalog_lists_entries_in_stable_order() {
    let a = run(&["catalog"]);
    assert!(a.status.success());
    let text = stdout(&a);
    let pos = |s: &str| text.find(s).unwrap_or_else(|| panic!("missing {s}"));
    assert!(pos("cone-clifford") < pos("rot-hypcyl"));
    assert!(pos("rot-hypcyl") < pos("cyl-spiral"));
    let b = run(&["catalog"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn catalog_json_has_branch_fields() {
    let out = run(&["catalog", "--json"]);
    assert!(out.status.success());
    let items: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(items.len() >= 8);
    let cone = items.iter().find(|i| i["name"] == "cone-clifford").unwrap();
    assert_eq!(cone["branch"], "ThreeCurv-ConeClifford");
    assert!(cone["params"].as_array().unwrap().iter().any(|p| p["name"] == "r"));
}

#[test]
fn classify_reports_branch_and_exit_zero() {
    let out = run(&["classify", "rot-hypcyl?r=1&n=5", "--samples", "8", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["branch"], "ThreeCurv-RotHypCylinder");
    assert_eq!(v["multiplicities"].as_array().unwrap().len(), 3);
}

#[test]
fn negative_control_exits_one() {
    let out = run(&["classify", "graph", "--samples", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("NotSemiParallel"));
}

#[test]
fn verify_positive_exits_zero() {
    let out = run(&["verify", "cone-clifford?r=0.7071067811865476&n=4", "--samples", "8", "--seed", "7"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASSED"));
}

#[test]
fn too_few_samples_exits_two() {
    let out = run(&["classify", "torus", "--samples", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_entry_exits_two() {
    let out = run(&["classify", "not-a-surface"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_seeds_give_byte_identical_json() {
    let args = ["classify", "cone-clifford", "--samples", "8", "--seed", "11", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn spec_file_target_is_accepted() {
    let dir = std::env::temp_dir();
    let path = dir.join("moebiuslab_cli_spec_test.json");
    std::fs::write(
        &path,
        r#"{"kind": "surface", "surface": "clifford-torus", "r": 0.7071067811865476,
            "construction": "cone", "n": 4, "axis_ratio": 1.2}"#,
    )
    .unwrap();
    let out = run(&["classify", path.to_str().unwrap(), "--samples", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("NotSemiParallel"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn out_flag_writes_report_file() {
    let dir = std::env::temp_dir();
    let path = dir.join("moebiuslab_cli_out_test.json");
    let out = run(&[
        "verify", "torus", "--samples", "8",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    std::fs::remove_file(&path).ok();
}
