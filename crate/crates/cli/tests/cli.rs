use std::process::Command;

use rqbc_core::harness::parse_jsonl;
use serde_json::Value;

fn rqbc(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rqbc").chain(args.iter().copied());
    let code = rqbc_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn enumerate_single_z0_has_sixteen_branches() {
    let (code, out, _) = rqbc(&["enumerate", "--scheme", "single", "--phi", "Z0"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let branches = v["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 16);
    for b in branches {
        assert!((b["probability"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-12);
        assert_eq!(b["verdict"]["outcome"], "accept");
        assert!(b["swap_outcome"]["i"].is_u64());
        let event = &b["schedule"]["events"][0];
        assert!(event["actor"].is_string() && event["time"].is_number() && event["kind"].is_string());
    }
}

#[test]
fn attack_scan_flags_class_switch() {
    let (code, out, _) = rqbc(&["attack-scan", "--scheme", "single", "--mode", "R2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let row = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["strategy"]["kind"] == "relabel_announce" && r["strategy"]["delta"] == json(r#"{"i":0,"j":1}"#))
        .unwrap();
    assert_eq!(row["detection_probability"].as_f64().unwrap(), 1.0);
    assert!(row["claim"]["statement"].is_string());
    assert_eq!(row["agrees"], true);
}

#[test]
fn r1_scan_disagrees_under_strict() {
    let (code, _, err) = rqbc(&["attack-scan", "--scheme", "single", "--mode", "R1", "--strict"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = rqbc(&["attack-scan", "--scheme", "single", "--mode", "R1"]);
    assert_eq!(code, 0);
}

#[test]
fn audit_exit_codes() {
    let (code, out, _) = rqbc(&["audit", "--x", "1", "--c", "1", "--T", "1.5"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["violations"].as_array().unwrap().len(), 1);
    assert_eq!(v["violations"][0]["kind"], "reveal_before_store");
    for t in ["2", "1000", "1e9"] {
        let (code, out, _) = rqbc(&["audit", "--x", "1", "--c", "1", "--T", t, "--scheme", "multi"]);
        assert_eq!(code, 0, "{out}");
    }
}

#[test]
fn audit_reads_schedule_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut schedule = serde_json::to_value(rqbc_core::spacetime::standard_schedule(1.0, 1.0, 10.0, rqbc_core::Scheme::Single).unwrap()).unwrap();
    let path = dir.path().join("schedule.json");
    std::fs::write(&path, schedule.to_string()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(rqbc(&["audit", "--input", p]).0, 0);
    schedule["messages"][0]["arrival_time"] = Value::from(0.5);
    std::fs::write(&path, schedule.to_string()).unwrap();
    let (code, out, _) = rqbc(&["audit", "--input", p]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["violations"][0]["kind"], "superluminal_message");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(rqbc(&["frobnicate"]).0, 1);
    assert_eq!(rqbc(&["run", "--bogus"]).0, 1);
    assert_eq!(rqbc(&["run", "--mode", "R3"]).0, 1);
    assert_eq!(rqbc(&["run", "--strategy", "relabel:00"]).0, 1);
    assert_eq!(rqbc(&["run", "--scheme", "single", "--phi", "X0"]).0, 1);
    assert_eq!(rqbc(&["run", "--trials", "0"]).0, 1);
    assert_eq!(rqbc(&["--help"]).0, 0);
}

#[test]
fn run_is_deterministic_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let (code, _, err) = rqbc(&[
            "run", "--scheme", "string", "--n-pairs", "3", "--trials", "5", "--seed", "11", "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let ts = parse_jsonl(std::str::from_utf8(&bytes).unwrap()).unwrap();
    assert_eq!(ts.len(), 15);
}

#[test]
fn strict_run_with_cheating_exits_two() {
    let args = ["run", "--scheme", "single", "--phi", "Z0", "--strategy", "relabel:01", "--trials", "3"];
    assert_eq!(rqbc(&args).0, 0);
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(rqbc(&strict).0, 2);
}

#[test]
fn summary_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"scheme":"string","n_pairs":2,"strategy":"relabel:10","trials":4000,"seed":5}"#).unwrap();
    let (code, out, err) = rqbc(&["run", "--summary", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["trials"], 4000);
    assert_eq!(v["all_agree"], true);
    let accept = v["stats"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["observable"] == "verdict" && s["outcome"] == "accept")
        .unwrap();
    assert!((accept["exact"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    let (again, _, _) = rqbc(&["run", "--summary", "--config", cfg.to_str().unwrap()]);
    assert_eq!(again, 0);
    assert_eq!(rqbc(&["run", "--summary", "--config", cfg.to_str().unwrap()]).1, out);

    std::fs::write(&cfg, r#"{"scheme":"single","unknown":1}"#).unwrap();
    assert_eq!(rqbc(&["run", "--config", cfg.to_str().unwrap()]).0, 1);
}

#[test]
fn report_renders_saved_scan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, _, _) = rqbc(&["attack-scan", "--scheme", "string", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, out, _) = rqbc(&["report", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("relabel:11"));
    assert!(out.contains("NO"));
    let (code, _, _) = rqbc(&["report", "--input", path.to_str().unwrap(), "--strict"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_runs() {
    let status = Command::new(env!("CARGO_BIN_EXE_rqbc"))
        .args(["audit", "--x", "1", "--c", "1", "--T", "1.5"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = Command::new(env!("CARGO_BIN_EXE_rqbc")).arg("--version").output().unwrap();
    assert_eq!(status.status.code(), Some(0));
}
