use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmt-lab"))
        .args(args)
        .env("RMT_LAB_OUT", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn list_covers_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["list"], dir.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let ids: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    for id in ["lsc", "rigidity", "deloc", "flucavg", "dbm", "loggas-xval", "repulsion", "gap-local", "band", "surmise"] {
        assert!(ids.contains(&id), "{id} missing");
    }
    assert!(ids.len() >= 10);
}

#[test]
fn unknown_experiment_exits_2_with_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["run", "--experiment", "nonsense"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("lsc"));
}

#[test]
fn malformed_config_and_unknown_param_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(code(&lab(&["run", "--config", cfg.to_str().unwrap()], dir.path())), 2);
    std::fs::write(&cfg, r#"{"experiment": "identities", "params": {"gird": 3}}"#).unwrap();
    assert_eq!(code(&lab(&["run", "--config", cfg.to_str().unwrap()], dir.path())), 2);
}

fn csv(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("lsc_per_seed.csv")).unwrap()
}

#[test]
fn repeated_runs_write_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "--experiment", "lsc", "--N", "500", "--seed", "7"];
    assert_eq!(code(&lab(&args, a.path())), 0);
    assert_eq!(code(&lab(&args, b.path())), 0);
    let text = csv(a.path());
    assert_eq!(text, csv(b.path()));
    assert!(text.starts_with("# config_hash="));
    assert!(text.lines().next().unwrap().ends_with("seed=7"));
}

#[test]
fn thread_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let base = ["run", "--experiment", "lsc", "--N", "120,240", "--samples", "6", "--seed", "3"];
    let mut one = base.to_vec();
    one.extend(["--threads", "1"]);
    let mut four = base.to_vec();
    four.extend(["--threads", "4"]);
    lab(&one, a.path());
    lab(&four, b.path());
    assert_eq!(csv(a.path()), csv(b.path()));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"experiment": "identities", "seed": 4, "sizes": [16], "samples": 2, "params": {"grid": 20}}"#).unwrap();
    let o = lab(&["run", "--config", cfg.to_str().unwrap(), "--seed", "9"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("identities.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["config"]["params"]["grid"], 20);
    assert_eq!(summary["passed"], true);
}

#[test]
fn failing_checks_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    // A histogram of two tiny spectra cannot be within 1e-6 of the semicircle.
    std::fs::write(&cfg, r#"{"experiment": "semicircle", "sizes": [20], "samples": 2, "params": {"l1_tol": 1e-6}}"#).unwrap();
    assert_eq!(code(&lab(&["run", "--config", cfg.to_str().unwrap()], dir.path())), 1);
}
