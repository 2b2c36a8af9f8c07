use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn decowave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decowave")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(format!("{name}.toml"));
    std::fs::write(&path, format!("{body}\n[output]\nprefix = \"{name}\"\n")).unwrap();
    path
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const FREE: &str = r#"
[system]
kind = "ideal-free"
particles = 64
[grid]
cells_per_side = 16
[measurement]
times = [0.0, 0.5, 1.0, 4.0]
tolerance = 1e-10
"#;

#[test]
fn run_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free", FREE);
    let out = decowave(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/free.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,r_index,re_rho,im_rho,density"));
    assert_eq!(csv.lines().count(), 1 + 4 * 16);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0.0000000000000000e0");
    assert_eq!(first[4], "4.0000000000000000e0");
    let m = read_json(dir.path().join("out/free_manifest.json"));
    assert_eq!(m["kind"], "ideal-free");
    assert!(m["invariants"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(m["files"][0], "free.csv");
    assert!(m.get("wall_clock_seconds").is_none());
}

#[test]
fn bogoliubov_manifest_records_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bog",
        "[system]\nkind = \"bogoliubov\"\nparticles = 32\n[grid]\ncells_per_side = 32\n[interaction]\nv0 = 1.0\n[measurement]\ntimes = [0.0, 1.0]\npositions = [0, 1, 2]\n",
    );
    let out = decowave(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(dir.path().join("out/bog_manifest.json"));
    let d = &m["derived"];
    assert_eq!(d["sound_speed"], 1.0);
    assert!(d["a"].as_f64().unwrap() > 0.0);
    assert!(d["b"].as_f64().unwrap() > 1.0);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad", &FREE.replace("ideal-free", "ideal-harmonic"));
    let out = decowave(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("system.omega"));

    let cfg = write_config(dir.path(), "typo", &format!("{FREE}\n[grid]\nsize = 3\n"));
    let out = decowave(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lenient_flag_accepts_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "extra", &FREE.replace("[grid]", "[grid]\nlabel = \"x\""));
    let out = decowave(&["--lenient", "run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.label"));
}

#[test]
fn compare_branch_sum_against_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "free", FREE);
    let out = decowave(&["compare", "--config", cfg.to_str().unwrap(), "--reference", "analytic"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let r = read_json(dir.path().join("out/free_compare_analytic.json"));
    let sec = &r["sections"][0];
    assert_eq!(sec["name"], "branch-sum-vs-closed-form");
    assert!(sec["max_abs"].as_f64().unwrap() < 1e-10);
    assert_eq!(sec["passed"], true);
}

#[test]
fn compare_oracle_with_scaling_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "orc",
        "[system]\nkind = \"oracle\"\nparticles = 24\nparticle_scan = [6, 12, 24]\n[grid]\ncells_per_side = 3\n[measurement]\ntimes = [0.0, 0.5, 1.5]\n",
    );
    let out = decowave(&["compare", "--config", cfg.to_str().unwrap(), "--reference", "oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let r = read_json(dir.path().join("out/orc_compare_oracle.json"));
    assert_eq!(r["sections"][0]["per_time_max"].as_array().unwrap().len(), 3);
    let rows = r["scaling"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["hilbert_dimension"], 325);
}

#[test]
fn front_speed_of_sound() {
    let dir = tempfile::tempdir().unwrap();
    let positions: Vec<String> = (20..=110).step_by(5).map(|r: usize| r.to_string()).collect();
    let cfg = write_config(
        dir.path(),
        "front",
        &format!(
            "[system]\nkind = \"bogoliubov\"\nparticles = 256\n[grid]\ncells_per_side = 256\n[interaction]\nv0 = 1.0\nk_cut = 0.5\n[measurement]\nt_stop = 120.0\nt_step = 0.25\npositions = [{}]\n",
            positions.join(", ")
        ),
    );
    let out = decowave(&["front-speed", "--config", cfg.to_str().unwrap(), "--threshold", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let speed: f64 = text.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((speed - 1.0).abs() < 0.1, "{text}");
}

#[test]
fn selftest_passes() {
    let out = decowave(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}
