//! End-to-end tests of the `sbm` binary: exit codes, output files,
//! CSV round-trips, and manifest reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sbm_core::cli::csvio;

fn sbm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sbm"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    sbm().current_dir(dir).args(args).output().expect("binary must run")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sbm-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempdir("usage");
    // Missing required coupling.
    let out = run_in(&dir, &["scan-amplitude"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--g"));
    // Unknown subcommand prints usage.
    let out = run_in(&dir, &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("usage"));
    // Help succeeds.
    let out = run_in(&dir, &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempdir("validation");
    let out = run_in(&dir, &["dynamics", "--g", "-0.2", "--amplitude", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g must be ≥ 0"));

    // Strict config: unknown keys are an error (usage).
    let config = dir.join("bad.json");
    std::fs::write(
        &config,
        r#"{"model": {"epsilon": 0, "g": 0.2, "extra": 1}, "drive": {"kind": "photon", "amplitude": 1.0}}"#,
    )
    .unwrap();
    let out = run_in(&dir, &["dynamics", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempdir("numeric");
    // No peaks in an off-resonance window: the estimation experiment fails.
    let out = run_in(
        &dir,
        &["estimate-g", "--g", "0.2", "--m", "1", "--i", "1", "--half-steps", "2",
          "--step", "0.001", "--t-long", "18.849555921538759"],
    );
    // The tiny window at short T_L has no detectable peaks.
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn dynamics_outputs_and_csv_round_trip() {
    let dir = tempdir("dynamics");
    let out = run_in(
        &dir,
        &["dynamics", "--g", "0.2", "--epsilon", "0", "--amplitude", "1.25",
          "--t-end", "6.283185307179586", "--stride", "10", "--out", "trace", "--svg"],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    let series = csvio::read_time_series(&csv).unwrap();
    assert_eq!(series.params.g, 0.2);
    assert!(series.len() > 100);
    // Serialize → parse → serialize is byte-stable.
    assert_eq!(csvio::write_time_series(&series).unwrap(), csv);
    // SVG and manifest accompany the CSV.
    assert!(dir.join("trace.svg").exists());
    let manifest = std::fs::read_to_string(dir.join("trace.manifest.json")).unwrap();
    assert!(manifest.contains("\"subcommand\": \"dynamics\""));
}

#[test]
fn scan_reruns_bit_identically_from_manifest() {
    let dir = tempdir("rerun");
    let base_args = [
        "scan-amplitude", "--g", "0.2", "--epsilon", "0", "--min", "1.2", "--max", "1.3",
        "--step", "0.01", "--audit", "off", "--t-long", "31.41592653589793",
    ];
    let mut first = base_args.to_vec();
    first.extend_from_slice(&["--out", "first"]);
    let out = run_in(&dir, &first);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // Identical flags → identical bytes.
    let mut second = base_args.to_vec();
    second.extend_from_slice(&["--out", "second"]);
    run_in(&dir, &second);
    let a = std::fs::read(dir.join("first.csv")).unwrap();
    let b = std::fs::read(dir.join("second.csv")).unwrap();
    assert_eq!(a, b);

    // Rerun from the manifest alone → identical bytes again.
    let out = run_in(
        &dir,
        &["scan-amplitude", "--config", "first.manifest.json", "--out", "third"],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let c = std::fs::read(dir.join("third.csv")).unwrap();
    assert_eq!(a, c);

    // The scan CSV round-trips exactly. At this short averaging horizon
    // the finite-time peak may sit one grid step off the resonance.
    let text = String::from_utf8(a).unwrap();
    let scan = csvio::read_resonance_scan(&text).unwrap();
    assert_eq!(scan.peaks.len(), 1);
    assert!((scan.peaks[0].position - 1.25).abs() < 0.01 + 1e-12);
    assert_eq!(csvio::write_resonance_scan(&scan).unwrap(), text);
}

#[test]
fn seed_env_and_flag_agree() {
    let dir = tempdir("seed");
    let args = [
        "dynamics", "--g", "0.2", "--amplitude", "1.25", "--initial", "random",
        "--t-end", "3.141592653589793", "--stride", "20",
    ];
    let mut flagged = args.to_vec();
    flagged.extend_from_slice(&["--seed", "7", "--out", "flagged"]);
    assert_eq!(run_in(&dir, &flagged).status.code(), Some(0));

    let mut via_env = args.to_vec();
    via_env.extend_from_slice(&["--out", "via_env"]);
    let out = sbm().current_dir(&dir).args(&via_env).env("SBM_SEED", "7").output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let a = std::fs::read(dir.join("flagged.csv")).unwrap();
    let b = std::fs::read(dir.join("via_env.csv")).unwrap();
    assert_eq!(a, b);

    // A different seed changes the trace.
    let mut other = args.to_vec();
    other.extend_from_slice(&["--seed", "8", "--out", "other"]);
    assert_eq!(run_in(&dir, &other).status.code(), Some(0));
    let c = std::fs::read(dir.join("other.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn resonance_table_and_units_reports() {
    let dir = tempdir("reports");
    let out = run_in(&dir, &["resonance-table", "--g", "0.2", "--m-max", "4", "--out", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1.2500"));
    assert!(stdout.contains("-0.40622"));
    let csv = std::fs::read_to_string(dir.join("table.csv")).unwrap();
    assert!(csv.contains("m,amplitude,predicted_mean"));

    let out = run_in(&dir, &["convert-units", "--preset", "flux-qubit"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("8.98"), "T_L arithmetic: {stdout}");
    assert!(stdout.contains("DISAGREES"));
    assert!(stdout.contains("63.66"));
    assert!(stdout.contains("0.1129"));

    let out = run_in(&dir, &["convert-units"]);
    assert_eq!(out.status.code(), Some(1));
}
