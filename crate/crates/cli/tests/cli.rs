use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const ZERO: &str = r#"
benchmark = "stationary_sphere"
solution = "zero"
scheme = "lmm_dir"
k_u = 2
k_pr = 1
k_lambda = 2
k_g = 2
level = 0
dt0 = 0.5
T = 1.0
mu = 0.5
"#;

fn esns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esns")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn zero_data_run_succeeds_with_zero_errors_and_creates_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("zero.toml");
    fs::write(&cfg, ZERO).unwrap();
    let out = tmp.path().join("does/not/exist");
    let o = esns(&["run", "-c", path(&cfg), "--out", path(&out), "--vtu-every", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("summary.json").exists() && out.join("solution_0002.vtu").exists());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    for key in ["e_u_ah", "e_u_h1", "e_u_linf_l2", "e_pu_linf_l2", "e_n_linf_l2", "e_div_linf_l2", "e_p_l2l2"] {
        assert_eq!(summary["report"][key].as_f64(), Some(0.0), "{key}");
    }
    let steps = fs::read_to_string(out.join("steps.csv")).unwrap();
    assert_eq!(steps.lines().count(), 4);
}

#[test]
fn malformed_config_exits_with_two_and_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, ZERO.replace("mu = 0.5", "mu = 0.5\nviscosity = 1")).unwrap();
    let o = esns(&["run", "-c", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("viscosity") && err.contains("line"), "{err}");

    fs::write(&cfg, ZERO.replace("k_g = 2", "k_g = 5")).unwrap();
    assert_eq!(esns(&["run", "-c", path(&cfg)]).status.code(), Some(2));
    assert_eq!(esns(&["run", "--level", "two"]).status.code(), Some(2));
    assert_eq!(esns(&["run", "--preset", "unknown"]).status.code(), Some(2));
    assert_eq!(esns(&["sweep", "--levels", "1,3"]).status.code(), Some(2));
}

fn without_walltime(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn sweep_is_deterministic_and_single_level_has_no_eoc() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let o = esns(&["sweep", "--levels", "0,1", "--T", "0.5", "--threads", "2", "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push((fs::read_to_string(out.join("sweep.csv")).unwrap(), fs::read(out.join("eoc.csv")).unwrap()));
    }
    assert_eq!(without_walltime(&csvs[0].0), without_walltime(&csvs[1].0));
    assert_eq!(csvs[0].1, csvs[1].1);
    assert_eq!(csvs[0].0.lines().count(), 3);

    let out = tmp.path().join("single");
    let o = esns(&["sweep", "--levels", "0", "--T", "0.5", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 2);
    assert!(!out.join("eoc.csv").exists());
}

#[test]
fn check_passes_on_a_fresh_build() {
    let o = esns(&["check"]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{table}");
    assert!(table.contains("PASS") && !table.contains("FAIL"));
}

#[test]
fn geometry_report_writes_json() {
    let tmp = tempfile::tempdir().unwrap();
    let o = esns(&["geom-report", "--kg", "1", "--levels", "0,1", "--out", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("geometry.json")).unwrap()).unwrap();
    assert_eq!(v[0]["rows"].as_array().unwrap().len(), 2);
}
