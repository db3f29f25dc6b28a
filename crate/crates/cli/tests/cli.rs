use std::path::Path;
use std::process::{Command, Output};

use heis_cli::{cmd_model_symbols, cmd_star_check, cmd_torus, RunConfig};
use heis_core::verify::Report;

const SMALL_TORUS: &str = r#"
[torus]
cluster_k = [0, 2, 4]
cluster_n = [32, 64]
weyl_runs = [[4, 32], [8, 64]]
band_k = 8
band_n = [64]
"#;

fn heis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heis")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn report_in(dir: &Path) -> Report {
    let sub = std::fs::read_dir(dir).unwrap().next().unwrap().unwrap().path();
    serde_json::from_str(&std::fs::read_to_string(sub.join("report.json")).unwrap()).unwrap()
}

#[test]
fn star_check_default_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nested/out");
    let o = heis(&["star-check", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report = report_in(&out);
    assert!(report.passed());
    assert_eq!(report.checks.len(), 2);
}

#[test]
fn zero_form_uses_pointwise_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_toml("[star]\nform = \"zero\"\ninstances = 40\n").unwrap();
    let cfg = RunConfig { out: tmp.path().to_string_lossy().into_owned(), ..cfg };
    let outcome = cmd_star_check(&cfg).unwrap();
    assert!(outcome.report.checks.iter().any(|c| c.name.contains("pointwise") && c.passed));
    assert_eq!(outcome.exit_code(), 0);
}

#[test]
fn corrupt_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "[torus]\ncluster_k = [4, 8\n");
    let o = heis(&["torus", "--config", &path, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line"), "{err}");
    assert_eq!(heis(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(heis(&["all", "--jobs", "0", "--dry-run"]).status.code(), Some(2));
}

#[test]
fn pole_request_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "[models]\nresolvent_z = [0.5, 0.0]\n");
    let o = heis(&["model-symbols", "--config", &path, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole"));
}

#[test]
fn model_symbols_defaults_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig { out: tmp.path().to_string_lossy().into_owned(), ..RunConfig::default() };
    let outcome = cmd_model_symbols(&cfg).unwrap();
    assert!(outcome.report.passed(), "{}", heis_cli::summary(&outcome.report));
    // five projector cases, the d = 2, m = 1 case has rank 2
    assert!(outcome.report.checks.iter().any(|c| c.name == "projector: d = 2, m = 1" && c.detail.contains("rank 2")));
}

#[test]
fn torus_run_reuses_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), SMALL_TORUS);
    let out = tmp.path().join("out");
    let args = ["torus", "--config", &path, "--out", out.to_str().unwrap()];
    let first = heis(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let sub = std::fs::read_dir(&out).unwrap().next().unwrap().unwrap().path();
    for f in ["inputs.json", "spectra.json", "report.json", "report.csv", "report.svg"] {
        assert!(sub.join(f).exists(), "{f}");
    }
    let cold = std::fs::read(sub.join("report.json")).unwrap();
    let second = heis(&args);
    assert!(String::from_utf8_lossy(&second.stdout).contains("(8 cached spectra reused)"));
    assert_eq!(std::fs::read(sub.join("report.json")).unwrap(), cold);
    let report = report_in(&out);
    assert!(report.checks.iter().any(|c| c.name.starts_with("torus: zero-flux") && c.passed));
    assert_eq!(report.clusters.len(), 2 * 2 * 3);
}

#[test]
fn dry_run_computes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let o = heis(&["all", "--dry-run", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("torus solve: k = 24, N = 256"));
    assert!(!out.exists());
}

#[test]
fn lattice_cap_is_a_resource_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), &format!("{SMALL_TORUS}max_dimension = 1000\n"));
    let o = heis(&["torus", "--config", &path, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let cfg = RunConfig::from_toml("[torus]\nmax_hermite = 32\n").unwrap();
    assert_eq!(cmd_model_symbols(&cfg).unwrap_err().exit_code(), 3);
}

#[test]
fn failed_tolerance_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "[star]\ninstances = 50\ntolerance = 1e-300\n");
    let o = heis(&["star-check", "--config", &path, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn seed_changes_the_cache_key() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    heis(&["star-check", "--out", out, "--seed", "1"]);
    heis(&["star-check", "--out", out, "--seed", "2"]);
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 2);
}

#[test]
fn jobs_do_not_change_results() {
    let base = RunConfig::from_toml(SMALL_TORUS).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let one = RunConfig { out: a.path().to_string_lossy().into_owned(), ..base.clone() };
    let r1 = cmd_torus(&one).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let three = RunConfig { out: b.path().to_string_lossy().into_owned(), jobs: 3, ..base };
    let r3 = pool.install(|| cmd_torus(&three)).unwrap();
    assert_eq!(r1.dir.file_name(), r3.dir.file_name());
    assert_eq!(std::fs::read(r1.dir.join("spectra.json")).unwrap(), std::fs::read(r3.dir.join("spectra.json")).unwrap());
}
