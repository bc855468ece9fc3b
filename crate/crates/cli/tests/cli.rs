use std::path::Path;
use std::process::{Command, Output};

fn dlpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlpack")).args(args).output().expect("binary runs")
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn pentagon_certifies_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlpack(&["--regular", "5", "--trials", "2000", "--out", dir.path().to_str().unwrap(), "--svg"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("status: StronglyExtreme"));
    let r = report(dir.path());
    assert_eq!(r["result"]["status"], "strongly_extreme");
    let density = r["result"]["density"].as_f64().unwrap();
    assert!((density - (5.0 - 5f64.sqrt()) / 3.0).abs() < 1e-9);
    let svg = std::fs::read_to_string(dir.path().join("packing.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn vertex_file_input_and_json_only() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("poly.json");
    std::fs::write(&input, r#"{"vertices": [[0,0],[2,-0.3],[3.1,0.9],[2.4,2.2],[0.7,2.5],[-0.6,1.2]]}"#).unwrap();
    let out = dlpack(&["--input", input.to_str().unwrap(), "--json-only", "--trials", "1000"]);
    assert!(matches!(out.status.code(), Some(0 | 2)));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    assert_eq!(v["input"]["kind"], "vertices");
    assert!(v.get("timings").is_none());
}

#[test]
fn hexagon_is_gated_with_exit_two() {
    let out = dlpack(&["--regular", "6", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ExceptionalTypeI"));
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(dlpack(&["--regular", "2"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, r#"{"vertices": [[0,0],[2,0],[1,0.2],[2,2],[0,2]]}"#).unwrap();
    let out = dlpack(&["--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("convex"));
    // Clap usage errors use their own nonzero code.
    assert_ne!(dlpack(&[]).status.code(), Some(0));
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = dlpack(&["--regular", "7", "--seed", "9", "--trials", "3000", "--out", d.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ra = std::fs::read(a.path().join("report.json")).unwrap();
    let rb = std::fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlpack(&["--regular", "5", "--trials", "100", "--timings", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(dir.path())["timings"]["certify_seconds"].as_f64().is_some());
}
