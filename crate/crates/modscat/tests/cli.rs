mod common;

use std::path::Path;
use std::process::{Command, Output};

use modscat::config::Schedule;
use modscat_core::solver::BoundaryMonitor;

fn modscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modscat")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &Path, c: &modscat::ExperimentConfig) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, c.to_toml()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn help_exits_zero() {
    let o = modscat(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("simulate"));
    for sub in ["simulate", "contrast", "pseudoconformal", "propcheck", "fit"] {
        assert_eq!(code(&modscat(&[sub, "--help"])), 0, "{sub}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&modscat(&["simulate", "missing.toml"])), 2);
    assert_eq!(code(&modscat(&["frobnicate"])), 2);
    assert_eq!(code(&modscat(&[])), 2);
    assert_eq!(code(&modscat(&["fit", "missing.csv", "--column", "linf"])), 2);
    assert_eq!(code(&modscat(&["propcheck", "--suite", "nope"])), 2);
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "name = 3\n").unwrap();
    assert_eq!(code(&modscat(&["simulate", path.to_str().unwrap()])), 2);
}

#[test]
fn fvw_suite_passes() {
    let o = modscat(&["propcheck", "--suite", "fvw", "--samples", "100000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["suite"], "fvw");
}

#[test]
fn simulate_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &common::small(&out));
    let o = modscat(&["simulate", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["diagnostics.csv", "ledger.csv", "linf.csv", "contrast.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let linf = out.join("linf.csv");
    let o = modscat(&["fit", linf.to_str().unwrap(), "--column", "linf"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(fit["alpha"].as_f64().unwrap() > 0.0);
    assert_eq!(code(&modscat(&["fit", linf.to_str().unwrap(), "--column", "nope"])), 2);
}

#[test]
fn contrast_needs_long_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &common::small(&dir.path().join("out")));
    assert_eq!(code(&modscat(&["contrast", &cfg])), 2);
}

#[test]
fn pseudoconformal_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut c = common::small(&out);
    c.time.t_end = 0.75;
    c.time.schedule = Schedule::Dyadic { fine_prefix: 0 };
    let cfg = write_config(dir.path(), &c);
    let o = modscat(&["pseudoconformal", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn invariant_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = common::small(&dir.path().join("out"));
    c.grid.half_width = 8.0;
    c.grid.points = 128;
    c.monitor.boundary = Some(BoundaryMonitor { radius_fraction: 0.5, tolerance: 1e-12 });
    let cfg = write_config(dir.path(), &c);
    let o = modscat(&["simulate", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("boundary_mass"));
}

#[test]
fn sweep_output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let base = dir.path().join(format!("t{threads}"));
        std::fs::create_dir_all(&base).unwrap();
        let paths: Vec<String> = (0..3)
            .map(|k| {
                let mut c = common::small(&base.join(format!("run{k}")));
                c.time.t_end = 4.0;
                c.initial = modscat::config::InitialSpec::RandomH11 {
                    seed: k,
                    amplitude: 0.5,
                    correlation_length: 1.0,
                    envelope_width: 2.0,
                };
                let p = base.join(format!("run{k}.toml"));
                std::fs::write(&p, c.to_toml()).unwrap();
                p.to_str().unwrap().to_string()
            })
            .collect();
        let mut args = vec!["sweep"];
        args.extend(paths.iter().map(String::as_str));
        let o = Command::new(env!("CARGO_BIN_EXE_modscat")).env("MODSCAT_THREADS", threads).args(&args).output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        base
    };
    let (a, b) = (run("1"), run("3"));
    for k in 0..3 {
        for f in ["diagnostics.csv", "ledger.csv", "linf.csv", "contrast.csv"] {
            let read = |base: &Path| std::fs::read(base.join(format!("run{k}")).join(f)).unwrap();
            assert_eq!(read(&a), read(&b), "run{k}/{f}");
        }
    }
}
