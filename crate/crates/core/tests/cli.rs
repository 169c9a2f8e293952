use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_study"))
        .arg(&cfg)
        .args(["--out", dir.join("out").to_str().unwrap()])
        .args(extra)
        .env_remove("RAYLEIGH_OUT_DIR")
        .output()
        .unwrap()
}

const DISPERSION: &str = "study = \"dispersion\"\nprofile = \"exp_decay\"\n[grid]\nc = [0.3, 0.2]\nalpha = [0.1, 0.05, 0.025]\n";

#[test]
fn dispersion_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), DISPERSION, &["--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/dispersion.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,ratio_re,ratio_im,expansion_re,expansion_im,remainder");
    assert_eq!(lines.len(), 4);
    // Remainder column decays roughly like alpha^3.
    let rem: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next_back().unwrap().parse().unwrap()).collect();
    for w in rem.windows(2) {
        assert!((4.0..=16.0).contains(&(w[0] / w[1])));
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/dispersion.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["criterion"], "A3");
    let schema: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/dispersion.schema.json")).unwrap()).unwrap();
    assert_eq!(schema["columns"].as_array().unwrap().len(), 6);
}

#[test]
fn identical_config_gives_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = "study = \"local-scaling\"\nprofile = \"power\"\n[grid]\nn = [2, 3]\nc_abs = [1e-2, 1e-3, 1e-4]\n";
    assert_eq!(run(a.path(), cfg, &["--jobs", "1"]).status.code(), Some(0));
    assert_eq!(run(b.path(), cfg, &["--jobs", "4"]).status.code(), Some(0));
    let x = fs::read(a.path().join("out/local-scaling.csv")).unwrap();
    let y = fs::read(b.path().join("out/local-scaling.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn empty_grid_warns_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "study = \"dispersion\"\n[grid]\nalpha = []\n", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let csv = fs::read_to_string(dir.path().join("out/dispersion.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn config_errors_exit_two_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "study = \"dispersion\"\n[grid]\nalpha = 0.1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = run(dir.path(), "study = \"dispersion\"\nbogus = 1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), "study = \"nope\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), "study = \"dispersion\"\nprofile = \"power:n=x\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_study")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // Far outside the small-alpha range the remainder ratio leaves [4, 16].
    let out = run(dir.path(), "study = \"dispersion\"\n[grid]\nalpha = [3.2, 1.6]\n", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    // A real critical layer stops the study and names the tuple.
    let out = run(dir.path(), "study = \"riccati\"\n[grid]\nc = [0.3, 0.0]\n", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tuple 0.1"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "study = \"interval\"\n").unwrap();
    let target = dir.path().join("env-out");
    let out = Command::new(env!("CARGO_BIN_EXE_study")).arg(&cfg).env("RAYLEIGH_OUT_DIR", &target).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("interval.csv").exists());
    assert!(!target.join(".interval.csv.tmp").exists());
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in fs::read_dir(root).unwrap() {
        let text = fs::read_to_string(e.unwrap().path()).unwrap();
        rayleigh::studies::StudyConfig::from_toml(&text).unwrap();
        n += 1;
    }
    assert_eq!(n, 8);
}
