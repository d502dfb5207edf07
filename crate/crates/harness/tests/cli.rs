//! Exit codes, config loading, output formats and trace round-trips of the
//! command-line interface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bushy-sim"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("bushy-sim-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn lemmas_small_run_exits_zero() {
    let out = bin()
        .args(["lemmas", "--trials", "60", "--seed", "7"])
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("zero-failures"));
}

#[test]
fn bound_violation_exits_one() {
    // a single unlucky walk trial lands in the planted set, violating the
    // zero-margin bound
    let out = bin()
        .args(["walk", "--trials", "1", "--seed", "14", "--sigmas", "0"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn unknown_flag_exits_two_with_usage() {
    let out = bin().args(["walk", "--no-such-flag"]).output().expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "{stderr}");
}

#[test]
fn bad_config_file_exits_two() {
    let path = tmp("bad-config.json");
    std::fs::write(&path, r#"{ "kind": "walk-bound", "trials": "not-a-number" }"#).unwrap();
    let out = bin()
        .args(["walk", "--config"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn config_file_round_trip_drives_the_run() {
    let path = tmp("walk-config.json");
    std::fs::write(
        &path,
        r#"{
  "kind": "walk-bound",
  "g": { "kind": "const", "value": "0" },
  "h": { "kind": "pow2", "offset": 2 },
  "depth": 4,
  "trials": 200,
  "seed": 1,
  "sigmas": 3.0
}"#,
    )
    .unwrap();
    let out = bin().args(["walk", "--config"]).arg(&path).output().expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1.0000"), "{stdout}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn json_and_csv_reports_carry_the_same_numbers() {
    let json_path = tmp("walk.json");
    let csv_path = tmp("walk.csv");
    for (fmt, path) in [("json", &json_path), ("csv", &csv_path)] {
        let out = bin()
            .args(["walk", "--trials", "500", "--seed", "3", "--format", fmt, "--out"])
            .arg(path)
            .output()
            .expect("spawn");
        assert!(out.status.success());
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    for field in ["frequency", "sigma", "margin"] {
        let v = json["checks"][0][field].as_f64().unwrap();
        assert!(csv.contains(&format!("{v}")), "{field}={v} not in csv: {csv}");
    }
    assert!(csv.contains(json["checks"][0]["bound"].as_str().unwrap()));
    let _ = std::fs::remove_file(&json_path);
    let _ = std::fs::remove_file(&csv_path);
}

#[test]
fn dnc_trace_feeds_the_audit_subcommand() {
    let trace_path = tmp("trace.jsonl");
    let out = bin()
        .args(["dnc", "--trials", "50", "--seed", "5", "--trace"])
        .arg(&trace_path)
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin().args(["audit", "--trace"]).arg(&trace_path).output().expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(report["draws_valid"], true);
    assert_eq!(report["witnesses_valid"], true);
    let _ = std::fs::remove_file(&trace_path);
}

#[test]
fn diag_dumps_table_and_manifest() {
    let manifest_path = tmp("manifest.json");
    let out = bin()
        .args(["diag", "--budget", "500", "--max-code-bits", "8", "--manifest"])
        .arg(&manifest_path)
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let rows: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(rows.as_array().unwrap().len() >= 16);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert!(manifest.get("0").is_some());
    let _ = std::fs::remove_file(&manifest_path);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let one = tmp("threads-1.json");
    let many = tmp("threads-8.json");
    for (threads, path) in [("1", &one), ("8", &many)] {
        let out = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args(["dnc", "--trials", "200", "--seed", "11", "--out"])
            .arg(path)
            .output()
            .expect("spawn");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&one).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&many).unwrap()).unwrap();
    a["wall_clock_ms"] = 0.into();
    b["wall_clock_ms"] = 0.into();
    assert_eq!(a, b);
    let _ = std::fs::remove_file(&one);
    let _ = std::fs::remove_file(&many);
}

#[test]
fn family_prints_the_table() {
    let out = bin()
        .args(["family", "--m", "3", "--exact", "--kmax", "2"])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("65536"), "{stdout}");
}
