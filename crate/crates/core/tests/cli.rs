//! Exit codes and outputs of the command-line tool.

mod support;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use support::scenario_path;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndn-radar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn write_scenario(dir: &Path, name: &str, extra: &str) -> String {
    let topo = scenario_path("casa_dfw.toml");
    let path = dir.join(format!("{name}.toml"));
    fs::write(
        &path,
        format!(
            "name = \"{name}\"\ntopology = \"{}\"\npolicy = \"round_based\"\nrepetitions = 2\nduration_s = 60\n{extra}\n[synthetic]\nrounds = 1\n",
            topo.display()
        ),
    )
    .unwrap();
    path.display().to_string()
}

#[test]
fn validate_accepts_bundled_scenarios() {
    for s in [
        "baseline.toml",
        "rtt_sweep.toml",
        "loss_sweep.toml",
        "window_vs_round.toml",
    ] {
        let o = cli(&["validate", scenario_path(s).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{s}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("ok"));
    }
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.toml");
    let o = cli(&["validate", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    let bad = write_scenario(tmp.path(), "bad", "repetitions_typo = 3");
    let o = cli(&["validate", &bad]);
    assert_eq!(code(&o), 1);
    let o = cli(&["run", &bad, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(!tmp.path().join("o").exists());

    let o = cli(&[
        "compare",
        tmp.path().to_str().unwrap(),
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn run_writes_outputs_and_compare_reads_them() {
    let tmp = tempfile::tempdir().unwrap();
    let s = write_scenario(tmp.path(), "small", "");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let o = cli(&["run", &s, "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = cli(&[
        "run",
        &s,
        "--seed",
        "7",
        "--reps",
        "3",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    for f in [
        "files.csv",
        "nodes.csv",
        "summary.csv",
        "summary.txt",
        "mosaics.json",
    ] {
        assert!(a.join(f).exists(), "{f}");
    }
    assert!(!a.join("FAILED").exists());
    let summary = fs::read_to_string(b.join("summary.csv")).unwrap();
    assert!(
        summary.lines().skip(1).all(|l| l.contains(",3,7,9,")),
        "{summary}"
    );

    let o = cli(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("fortworth"));
    assert!(text.contains("6 of 6 rows matched"), "{text}");
}

#[test]
fn aborted_simulations_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    // every radar generates at t = 1 s, more events than the guard allows
    let s = write_scenario(tmp.path(), "stuck", "[network]\nlivelock_limit = 2\n");
    let out = tmp.path().join("o");
    let o = cli(&["run", &s, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("FAILED").exists());
}
