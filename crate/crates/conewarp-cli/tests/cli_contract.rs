//! CLI behavior: exit-code contract, config validation, replayable runs,
//! and the nonuniqueness demo through the binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_conewarp")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conewarp-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(bin()).args(args).output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn unknown_command_and_flags_exit_2() {
    assert_eq!(run(&["frobnicate"]).0, Some(2));
    assert_eq!(run(&["lemma-verify", "--bogus"]).0, Some(2));
    assert_eq!(run(&[]).0, Some(2));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tmp_dir("keys");
    let cfg = dir.join("c.json");
    std::fs::write(&cfg, r#"{"family": "stationary-round", "wat": true}"#).unwrap();
    let (code, err) = run(&["lemma-verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, Some(2));
    assert!(err.contains("unknown field"), "stderr: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn empty_sweep_schedule_exits_2() {
    let dir = tmp_dir("sweep");
    let cfg = dir.join("c.json");
    std::fs::write(
        &cfg,
        r#"{"family": "stationary-round",
            "sweep": {"f_values": [], "e_multipliers": [], "r0_values": []}}"#,
    )
    .unwrap();
    let (code, _) = run(&[
        "lemma-search",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(code, Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn stationary_search_succeeds_and_writes_certificate() {
    let dir = tmp_dir("search");
    let out = dir.join("out");
    let (code, _) = run(&[
        "lemma-search",
        "--out",
        out.to_str().unwrap(),
        "--grid",
        "radii=16",
        "--grid",
        "deltas=11",
        "--grid",
        "samples=4",
    ]);
    assert_eq!(code, Some(0));
    assert!(out.join("lemma_params.json").exists());
    assert!(out.join("certificate.csv").exists());
    assert!(out.join("config_echo.json").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<_> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn gh_demo_produces_crossover_table_and_replays() {
    let dir = tmp_dir("ghdemo");
    let cfg = dir.join("c.json");
    // Reduced sampling keeps the run short; thresholds stay at the
    // published values.
    std::fs::write(
        &cfg,
        r#"{"mode": "demo", "n_sample": 140, "graph_degree": 10,
            "gh_iterations": 200, "m_max": 48, "scales_per_target": 1,
            "own_upper_threshold": 0.05, "cross_lower_threshold": 0.1}"#,
    )
    .unwrap();
    let out1 = dir.join("out1");
    let (code, err) = run(&[
        "gh",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0), "stderr: {err}");
    let table = std::fs::read_to_string(out1.join("gh_bounds.csv")).unwrap();
    assert!(table.lines().filter(|l| !l.starts_with('#')).count() >= 3, "{table}");
    // Replay from the echoed config: byte-identical outputs.
    let out2 = dir.join("out2");
    let (code2, _) = run(&[
        "gh",
        "--config",
        out1.join("config_echo.json").to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(code2, Some(0));
    assert_eq!(dir_bytes(&out1), dir_bytes(&out2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn gh_smoke_reports_zero_bounds() {
    let dir = tmp_dir("smoke");
    let cfg = dir.join("c.json");
    std::fs::write(&cfg, r#"{"mode": "smoke", "n_sample": 60}"#).unwrap();
    let out = dir.join("out");
    let (code, _) = run(&["gh", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    let table = std::fs::read_to_string(out.join("gh_smoke.csv")).unwrap();
    assert!(table.contains("0,0"), "{table}");
    let _ = std::fs::remove_dir_all(&dir);
}
