//! Replaying an experiment with an identical config must produce byte-equal
//! output files, independently of the worker pool.

use std::fs;
use std::process::Command;

fn run(config: &str, out: &std::path::Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_levy-noise"))
        .args([
            "--config",
            config,
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "3",
        ])
        .status()
        .expect("binary runs");
    assert!(status.success());
}

#[test]
fn replay_produces_byte_identical_output() {
    let dir = std::env::temp_dir().join(format!("levy-noise-det-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let config = dir.join("fubini.toml");
    fs::write(
        &config,
        r#"
schema_version = 1
kind = "fubini"
dimension = 1
seed = 99
seeds = 6

[triplet]
gamma = 1.0
sigma = 1.0

[triplet.nu]
family = "finite-atomic"
atoms = [[2.0, 1.5]]

[sim]
horizon = 1.0
grid_dt = 0.004

[experiment]
phis = ["mollifier", "mollifier:0.2:0.9"]
"#,
    )
    .unwrap();
    let out1 = dir.join("a");
    let out2 = dir.join("b");
    fs::create_dir_all(&out1).unwrap();
    fs::create_dir_all(&out2).unwrap();
    run(config.to_str().unwrap(), &out1);
    run(config.to_str().unwrap(), &out2);
    let a = fs::read(out1.join("fubini.jsonl")).unwrap();
    let b = fs::read(out2.join("fubini.jsonl")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "outputs differ between identical runs");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_config_is_rejected_with_nonzero_exit() {
    let dir = std::env::temp_dir().join(format!("levy-noise-bad-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let config = dir.join("bad.toml");
    fs::write(
        &config,
        r#"
schema_version = 1
kind = "simulate"
dimension = 1

[triplet]
gamma = 0.0
sigma = -2.0

[triplet.nu]
family = "zero"

[sim]
horizon = 1.0
grid_dt = 0.01
"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_levy-noise"))
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.join("o").to_str().unwrap(),
        ])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sigma"), "field-level message, got: {err}");
    fs::remove_dir_all(&dir).ok();
}
