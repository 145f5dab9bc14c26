//! End-to-end runs of the `leapfrog` binary.

use std::path::Path;
use std::process::{Command, Output};

use leapfrog_sim::config::LoadingConfig;
use leapfrog_sim::io::{read_energy_csv, Manifest, ALPHA_HEADER, SNAPSHOT_HEADER};
use leapfrog_sim::scenarios::quiescent;

fn leapfrog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leapfrog")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path) -> Manifest {
    Manifest::parse(&std::fs::read_to_string(dir.join("manifest.txt")).unwrap())
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// A small elastic square with random initial velocity.
fn random_velocity_toml() -> String {
    let mut cfg = quiescent(16);
    cfg.loading = LoadingConfig::RandomVelocity { amplitude: 1.0 };
    cfg.time.duration = 200.0;
    cfg.to_toml()
}

#[test]
fn quiescent_run_stays_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = leapfrog(&["run", "--preset", "quiescent", "--grid", "16x16", "--duration", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_energy_csv(&out.join("energy.csv")).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.total() == 0.0 && r.imbalance == 0.0));
    assert_eq!(manifest(&out).get("status"), Some("completed"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = random_velocity_toml().replace("[time]\n", "[time]\nstep = 0.1\n");
    let path = write_config(dir.path(), "bad.toml", &text);
    let o = leapfrog(&["run", "--config", &path, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("step"));
}

#[test]
fn unstable_step_needs_opt_in_and_then_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "rv.toml", &random_velocity_toml());
    let out = dir.path().join("out");
    let o = leapfrog(&["run", "--config", &path, "--tau-factor", "1.05", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let o = leapfrog(&["run", "--config", &path, "--tau-factor", "1.05", "--allow-unstable", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let m = manifest(&out);
    assert_eq!(m.get("status"), Some("blow_up"));
    let step: u64 = m.get("failed_step").unwrap().parse().unwrap();
    assert!(step > 0);
}

#[test]
fn cfl_reports_bound_and_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "rv.toml", &random_velocity_toml());
    let o = leapfrog(&["cfl", "--config", &path, "--tau-factor", "0.5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    let fields: Vec<(&str, f64)> = first
        .split_whitespace()
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            (k, v.parse().unwrap())
        })
        .collect();
    assert_eq!(fields.iter().map(|f| f.0).collect::<Vec<_>>(), ["tau_max", "eta", "ratio_to_config"]);
    assert!(fields[0].1 > 0.0);
    assert_eq!(fields[1].1, 0.1);
    assert!((fields[2].1 - 0.5).abs() < 1e-12);
}

#[test]
fn reference_checks_pass() {
    let o = leapfrog(&["relax"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = leapfrog(&["converge", "--levels", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("observed_order="));
    assert_eq!(code(&leapfrog(&["converge", "--levels", "2"])), 2);
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "rv.toml", &random_velocity_toml());
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = leapfrog(&["run", "--config", &path, "--duration", "3", "--snapshots", "1,2.5", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        outputs.push(out);
    }
    let mut files: Vec<_> = std::fs::read_dir(&outputs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert!(files.len() >= 5, "{files:?}");
    for f in files {
        let a = std::fs::read(outputs[0].join(&f)).unwrap();
        let b = std::fs::read(outputs[1].join(&f)).unwrap();
        assert!(a == b, "{f:?} differs");
    }
}

#[test]
fn desk_delamination_ruptures_before_the_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = leapfrog(&["run", "--preset", "mode_i_desk", "--snapshots", "20", "--vti", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("first_rupture="));

    let alpha = std::fs::read_to_string(out.join("alpha.csv")).unwrap();
    let mut lines = alpha.lines();
    assert_eq!(lines.next(), Some(ALPHA_HEADER));
    let rupture = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|r| r[2] == 0.0)
        .expect("a debonded segment");
    assert!(rupture[0] > 0.0 && rupture[0] < 51.0);

    let m = manifest(&out);
    let t: f64 = m.get("first_rupture_time").unwrap().parse().unwrap();
    assert_eq!(t, rupture[0]);
    let step: u64 = m.get("snapshot_steps").unwrap().parse().unwrap();
    let csv = std::fs::read_to_string(out.join(format!("snapshot_{step}.csv"))).unwrap();
    assert_eq!(csv.lines().next(), Some(SNAPSHOT_HEADER));
    assert_eq!(csv.lines().count(), 1 + 101 * 101);
    assert!(out.join(format!("snapshot_{step}.vti")).exists());
}

#[test]
fn audit_accepts_the_desk_run() {
    let o = leapfrog(&["audit", "--preset", "mode_ii_desk", "--duration", "30", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("dissipation_monotone=true"));
}
