use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> PathBuf {
    workspace().join("scenarios").join(name)
}

fn dice(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dice"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn listed(out: &Path) -> Vec<String> {
    let mut files: Vec<String> = manifest(out)["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["path"].as_str().unwrap().to_string())
        .collect();
    files.sort();
    files
}

fn on_disk(root: &Path) -> Vec<String> {
    fn walk(root: &Path, dir: &Path, acc: &mut Vec<String>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, acc);
            } else {
                acc.push(path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/"));
            }
        }
    }
    let mut acc = Vec::new();
    walk(root, root, &mut acc);
    acc.retain(|p| p != "manifest.json");
    acc.sort();
    acc
}

#[test]
fn solve_writes_trajectory_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let cfg = scenario("nordhaus.toml");
    let o = dice(&out, &["solve", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(listed(&out), vec!["report.txt", "trajectory.csv"]);
    assert_eq!(on_disk(&out), listed(&out));
    let m = manifest(&out);
    assert_eq!(m["status"], "converged");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["config_path"], cfg.display().to_string());
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(m["wall_clock_seconds"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("year,"));
    assert_eq!(lines.count(), 100);
    for entry in m["files"].as_array().unwrap() {
        let bytes = fs::read(out.join(entry["path"].as_str().unwrap())).unwrap();
        assert_eq!(entry["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
}

#[test]
fn infeasible_damages_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("infeasible.toml");
    let o = dice(dir.path(), &["solve", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("dice: "));
    assert_eq!(manifest(dir.path())["status"], "infeasible");
}

#[test]
fn usage_errors_exit_with_code_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.toml");
    let nordhaus = scenario("nordhaus.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", missing.to_str().unwrap()],
        vec!["figures", "--which", "fig9"],
        vec!["sweep", nordhaus.to_str().unwrap(), "--a-values", ""],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = dice(dir.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[damage]\na = -1.0\n").unwrap();
    let o = dice(dir.path(), &["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn help_lists_exit_codes() {
    let o = Command::new(env!("CARGO_BIN_EXE_dice")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for needle in ["Exit codes", "infeasible", "DICE_OUT_DIR"] {
        assert!(text.contains(needle), "missing {needle:?}");
    }
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_dice"))
        .env("DICE_OUT_DIR", &out)
        .args(["figures", "--which", "fig1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(listed(&out), vec!["fig1_estimates.svg"]);
}

#[test]
fn figures_match_goldens_and_repeat() {
    let golden = workspace().join("crates/core/tests/golden");
    let first = TempDir::new().unwrap();
    let second = TempDir::new().unwrap();
    for out in [first.path(), second.path()] {
        let o = dice(out, &["figures"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let files = listed(first.path());
    assert_eq!(files.len(), 4);
    for f in &files {
        let a = fs::read(first.path().join(f)).unwrap();
        assert_eq!(a, fs::read(second.path().join(f)).unwrap(), "{f} differs between runs");
        assert_eq!(a, fs::read(golden.join(f)).unwrap(), "{f} differs from golden");
    }
    let (a, b) = (manifest(first.path()), manifest(second.path()));
    assert_eq!(a["files"], b["files"]);
    assert_eq!(a["config_hash"], b["config_hash"]);
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("nordhaus.toml");
    let o = dice(
        dir.path(),
        &["sweep", cfg.to_str().unwrap(), "--a-values", "0.00236,0.19236"],
    );
    // one converged run is enough for success
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let files = listed(dir.path());
    for f in [
        "summary.csv",
        "a_0.00236/trajectory.csv",
        "a_0.19236/report.txt",
        "fig4_output.svg",
    ] {
        assert!(files.iter().any(|p| p == f), "{f} not in {files:?}");
    }
    assert_eq!(on_disk(dir.path()), files);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("converged") && rows[1].contains("infeasible"));
}

#[test]
fn regress_reports_every_variant() {
    let dir = TempDir::new().unwrap();
    let o = dice(dir.path(), &["regress"]);
    assert_eq!(o.status.code(), Some(0));
    let txt = fs::read_to_string(dir.path().join("regression.txt")).unwrap();
    for v in [
        "unweighted/with-intercept",
        "unweighted/through-origin",
        "population-weighted/with-intercept",
        "population-weighted/through-origin",
    ] {
        assert!(txt.contains(v), "missing {v}");
    }
}

#[test]
fn ramsey_writes_saddle_path() {
    let dir = TempDir::new().unwrap();
    let o = dice(dir.path(), &["ramsey", "--horizon", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        listed(dir.path()),
        vec!["ramsey.txt", "ramsey_phase.svg", "saddle_path.csv"]
    );
    let o = dice(dir.path(), &["ramsey", "--k0-ratio", "-1"]);
    assert_eq!(o.status.code(), Some(1));
}
