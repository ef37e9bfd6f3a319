//! The `conelab` binary end to end.

use std::process::Command;

fn conelab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_conelab")).args(args).output().unwrap()
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_row_for_n1_has_c_quarter() {
    let o = conelab(&["constants", "--n", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# schema=constants/1\n"));
    let header: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).nth(1).unwrap().split(',').collect();
    let c = header.iter().position(|h| *h == "c_n").unwrap();
    assert_eq!(row[c].parse::<f64>().unwrap(), 0.25);
    let i = header.iter().position(|h| *h == "i_n").unwrap();
    assert_eq!(row[i].parse::<f64>().unwrap(), conelab::constants(1).unwrap().i_n);
}

#[test]
fn zero_dimension_is_a_usage_error_with_json() {
    let o = conelab(&["constants", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    let line = err.lines().find(|l| l.starts_with('{')).unwrap();
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["error"], "invalid_parameter");
    assert!(o.stdout.is_empty());
}

#[test]
fn empty_beta_list_is_a_usage_error() {
    let o = conelab(&["collapse", "--beta", ""]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = conelab(&["constants", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn collapse_n1_interval_length_is_half_pi() {
    let o = conelab(&["collapse", "--n", "1", "--beta", "0.1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cols: Vec<String> = serde_json::from_value(v["columns"].clone()).unwrap();
    let k = cols.iter().position(|c| c == "interval_length").unwrap();
    let len = v["rows"][0][k].as_f64().unwrap();
    assert!((len - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn schauder_is_byte_identical_across_runs_and_pool_sizes() {
    let a = conelab(&["schauder", "--seed", "7", "--beta", "0.25,0.1", "--grid", "16"]);
    let b = conelab(&["schauder", "--seed", "7", "--beta", "0.25,0.1", "--grid", "16"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let one = conelab(&["schauder", "--seed", "7", "--beta", "0.25,0.1", "--grid", "16", "--jobs", "1"]);
    let data = |o: &std::process::Output| stdout(o).lines().filter(|l| !l.starts_with("# config=")).collect::<Vec<_>>().join("\n");
    assert_eq!(data(&a), data(&one));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"n": [2, 3], "format": "json"}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = conelab(&["constants", "--config", p]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let o = conelab(&["constants", "--config", p, "--n", "1", "--format", "csv"]);
    assert!(stdout(&o).starts_with("# schema=constants/1"));
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn bad_config_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"nn": 3}"#).unwrap();
    let o = conelab(&["constants", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_file_receives_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = conelab(&["constants", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().starts_with("# schema=constants/1"));
}

#[test]
fn suites_lists_at_least_eight() {
    let o = conelab(&["suites"]);
    let rows = stdout(&o).lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert!(rows >= 8);
}

#[test]
fn expansions_suite_passes_and_unknown_suite_fails() {
    let o = conelab(&["verify", "expansions"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = conelab(&["verify", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("\"unknown_suite\""));
}

#[test]
fn potential_and_curvature_emit_finite_tables() {
    for cmd in ["potential", "curvature", "glue"] {
        let o = conelab(&[cmd, "--n", "2", "--sigma", "pos", "--grid", "40"]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(!text.contains("NaN") && !text.contains("inf"), "{cmd}");
    }
}
