use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ionnode::cli::{cmd_herald, parse_config, RunConfig, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

fn ionnode(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionnode"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn passing_run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ionnode(&["storage", "--seed", "3"], dir.path());
    assert_eq!(out.status.code(), Some(EXIT_PASS), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().last().unwrap().starts_with("PASS"));
    assert_eq!(files_in(dir.path()), ["counts_storage.csv", "summary.json"]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["verdict"], "PASS");
    assert_eq!(summary["master_seed"], 3);
}

#[test]
fn failing_acceptance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noisy.json");
    fs::write(&cfg, r#"{"device": {"eps_spam": 0.2}}"#).unwrap();
    let out = ionnode(&["storage", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(EXIT_FAIL));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(dir.path().join("out/summary.json").exists());
}

#[test]
fn bad_config_exits_one_with_the_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"device": {"storage_time": 0.1}}"#).unwrap();
    let out = ionnode(&["bell", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    assert!(String::from_utf8_lossy(&out.stderr).contains("device.storage_time"));
}

#[test]
fn herald_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = ionnode(&["herald", "--trials", "20000", "--seed", "5"], dir.path());
    assert!(out.status.code() == Some(EXIT_PASS) || out.status.code() == Some(EXIT_FAIL));
    let names = files_in(dir.path());
    assert!(names.iter().any(|n| n.starts_with("trace_") && n.ends_with(".csv")), "{names:?}");
    let trace = fs::read_to_string(dir.path().join("trace_heralds.csv")).unwrap();
    assert!(trace.lines().count() > 1000);
}

#[test]
fn shorter_window_lowers_the_success_fraction() {
    let mut config: RunConfig = parse_config(r#"{"device": {"storage_T": 0.1}, "trials": 20000}"#).unwrap();
    config.master_seed = 9;
    let r = cmd_herald(&config).unwrap();
    let frac = r.value("success_fraction").unwrap();
    let model = 1.0 - (-7.0f64 * 0.1).exp();
    assert!((frac - model).abs() < 0.01, "{frac} vs {model}");
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = ionnode(&["bell", "--seed", "42", "--shots", "12000"], d.path());
        assert!(out.status.code().is_some_and(|c| c != EXIT_ERROR));
    }
    for name in files_in(a.path()) {
        let read = |d: &Path| fs::read_to_string(d.join(&name)).unwrap();
        let (x, y) = (read(a.path()), read(b.path()));
        if name == "summary.json" {
            // Only the recorded output directory differs.
            let strip = |t: &str| {
                let mut v: serde_json::Value = serde_json::from_str(t).unwrap();
                v["config"]["output_dir"] = serde_json::Value::Null;
                v
            };
            assert_eq!(strip(&x), strip(&y));
        } else {
            assert!(x == y, "{name} differs");
        }
    }
}
