use std::path::PathBuf;
use std::process::{Command, Output};

fn pfaff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfaff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn system_file(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("systems");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_json_report() {
    let out = pfaff(&["analyze", &system_file("system_a.pfaff"), "--point", "origin", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["derived_flag"]["ranks"], serde_json::json!([3, 2]));
    let point = &v["points"][0];
    assert_eq!(point["sigma_dim"], 2);
    assert_eq!(point["characters"][0]["character_chain"], 1);
}

#[test]
fn analyze_text_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let out = pfaff(&[
        "analyze",
        &system_file("system_b.pfaff"),
        "--coords",
        "0,0,0,0,0,0",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.contains("derived flag"), "{text}");
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pfaff");
    std::fs::write(&bad, "chart x y;\nform w = dz;\nsystem S = w;\n").unwrap();
    let out = pfaff(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 10"), "{err}");
}

#[test]
fn unknown_point_and_bad_flags_exit_two() {
    let out = pfaff(&["analyze", &system_file("system_a.pfaff"), "--point", "nowhere"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pfaff(&["analyze", &system_file("system_a.pfaff"), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pfaff(&["catalog", "show", "no-such-entry"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_point_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("deg.pfaff");
    std::fs::write(&f, "chart x y;\nform w = x*dy;\nsystem S = [w];\npoint zero = (0, 1);\n").unwrap();
    let out = pfaff(&["analyze", f.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["points"][0]["degenerate"], true);
}

#[test]
fn catalog_list_and_show() {
    let out = pfaff(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("system-a") && text.contains("goursat-3"));
    let out = pfaff(&["catalog", "show", "system-b"]);
    assert!(stdout(&out).contains("designated chain: seed tilted"));
}

#[test]
fn run_all_json_is_deterministic() {
    let a = pfaff(&["catalog", "run-all", "--json"]);
    let b = pfaff(&["catalog", "run-all", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(a.status.code(), Some(if passed { 0 } else { 1 }));
}

#[test]
fn trace_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let out = pfaff(&[
        "trace",
        &system_file("system_a.pfaff"),
        "--from",
        "origin",
        "--dir",
        "0",
        "--step",
        "0.01",
        "--count",
        "10",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,x5,res_w1,res_w2,res_w3"));
    assert_eq!(lines.count(), 11);
}
