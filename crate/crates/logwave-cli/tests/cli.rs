//! End-to-end tests of the `logwave` binary: exit codes, emitted artifacts,
//! flag/env precedence and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn logwave(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logwave"))
        .args(args)
        .current_dir(dir)
        .env_remove("LOGWAVE_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn footer_value(csv: &str, key: &str) -> f64 {
    let needle = format!("# {key}=");
    csv.lines()
        .find_map(|l| l.strip_prefix(&needle))
        .unwrap_or_else(|| panic!("footer key {key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn zero_run_exits_clean_with_zero_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("zero.toml"), "[data]\nprofile = \"zero\"\n").unwrap();
    let out = logwave(
        &["run", "--config", "zero.toml", "--out", "out", "--n", "64"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let diag = read(&tmp.path().join("out/diagnostics.csv"));
    assert_eq!(footer_value(&diag, "A"), 0.0);
    assert_eq!(footer_value(&diag, "E"), 0.0);
    assert!(tmp.path().join("out/trajectory.csv").exists());
    assert!(tmp.path().join("out/summary.txt").exists());
}

#[test]
fn focusing_blowup_exits_4_with_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = logwave(
        &[
            "run", "--out", "out", "--sigma", "-1", "--amplitude", "3.0", "--n", "256",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4), "{}", stdout(&out));
    let summary = read(&tmp.path().join("out/summary.txt"));
    assert!(summary.contains("status = overflowed"));
    assert!(tmp.path().join("out/trajectory.csv").exists());
}

#[test]
fn cone_violation_exits_3_without_running() {
    let tmp = tempfile::tempdir().unwrap();
    let out = logwave(
        &["run", "--out", "out", "--t-final", "7.5"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!tmp.path().join("out/trajectory.csv").exists());
}

#[test]
fn invalid_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = logwave(&["run", "--out", "out", "--cfl", "1.5"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_round_trip_is_bit_exact_and_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let run_out = logwave(
        &[
            "run", "--out", "run", "--amplitude", "0.8", "--n", "256", "--record-stride", "2",
        ],
        tmp.path(),
    );
    assert_eq!(run_out.status.code(), Some(0));
    let cert_out = logwave(
        &["certify", "run/trajectory.csv", "--out", "cert"],
        tmp.path(),
    );
    assert_eq!(cert_out.status.code(), Some(0), "{}", stdout(&cert_out));
    assert!(stdout(&cert_out).contains("verdict = pass"));
    assert!(tmp.path().join("cert/certificate.txt").exists());
    assert!(tmp.path().join("cert/certificate.csv").exists());
    // The dump round-trips bit-exactly, so the recomputed diagnostics are
    // byte-identical to the original run's.
    assert_eq!(
        read(&tmp.path().join("run/diagnostics.csv")),
        read(&tmp.path().join("cert/diagnostics.csv"))
    );
}

#[test]
fn certify_zero_run_passes_with_one_interval() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("zero.toml"), "[data]\nprofile = \"zero\"\n").unwrap();
    logwave(
        &["run", "--config", "zero.toml", "--out", "run", "--n", "64"],
        tmp.path(),
    );
    let out = logwave(
        &["certify", "run/trajectory.csv", "--out", "cert"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("intervals = 1"));
}

#[test]
fn certify_truncated_dump_exits_6_without_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    logwave(&["run", "--out", "run", "--n", "128"], tmp.path());
    let dump = read(&tmp.path().join("run/trajectory.csv"));
    let cut = dump.len() * 2 / 3;
    std::fs::write(tmp.path().join("broken.csv"), &dump[..cut]).unwrap();
    let out = logwave(&["certify", "broken.csv", "--out", "cert"], tmp.path());
    assert_eq!(out.status.code(), Some(6));
    assert!(!tmp.path().join("cert/certificate.txt").exists());
}

#[test]
fn convergence_standing_wave_reports_second_order() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("wave.toml"),
        r#"
[nonlinearity]
enabled = false

[grid]
n = 128

[solve]
t_final = 2.0

[data]
profile = "standing-wave"
amplitude = 1.0
mode = 1
"#,
    )
    .unwrap();
    let out = logwave(
        &["convergence", "--config", "wave.toml", "--levels", "3"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    let order: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("observed_order = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.8..=2.2).contains(&order), "order {order}");
}

#[test]
fn convergence_single_level_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = logwave(&["convergence", "--levels", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_sigma_contrast_and_empty_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = logwave(
        &[
            "sweep",
            "--parameter",
            "sigma",
            "--values",
            "1,-1",
            "--amplitude",
            "2.5",
            "--n",
            "256",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = read(&tmp.path().join("out/sweep.csv"));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("1,completed"));
    assert!(rows[2].starts_with("-1,overflowed"));

    let empty = logwave(
        &[
            "sweep", "--parameter", "amplitude", "--values", "", "--out", "out2",
        ],
        tmp.path(),
    );
    assert_eq!(empty.status.code(), Some(0));
    let csv = read(&tmp.path().join("out2/sweep.csv"));
    assert_eq!(csv.lines().count(), 1, "header only");
}

#[test]
fn identical_configs_give_byte_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = logwave(
            &["run", "--out", dir, "--amplitude", "0.7", "--n", "128"],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        read(&tmp.path().join("a/trajectory.csv")),
        read(&tmp.path().join("b/trajectory.csv"))
    );
    assert_eq!(
        read(&tmp.path().join("a/diagnostics.csv")),
        read(&tmp.path().join("b/diagnostics.csv"))
    );
}

#[test]
fn output_dir_precedence_flag_env_config() {
    let tmp = tempfile::tempdir().unwrap();
    // Env var wins over the config default…
    let out = Command::new(env!("CARGO_BIN_EXE_logwave"))
        .args(["run", "--n", "64", "--amplitude", "0.1"])
        .current_dir(tmp.path())
        .env("LOGWAVE_OUTPUT_DIR", "from_env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from_env/summary.txt").exists());
    assert!(!tmp.path().join("out/summary.txt").exists());
    // …and --out wins over the env var.
    let out = Command::new(env!("CARGO_BIN_EXE_logwave"))
        .args(["run", "--n", "64", "--amplitude", "0.1", "--out", "from_flag"])
        .current_dir(tmp.path())
        .env("LOGWAVE_OUTPUT_DIR", "ignored_env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from_flag/summary.txt").exists());
    assert!(!tmp.path().join("ignored_env/summary.txt").exists());
}

#[test]
fn flags_override_config_file_keys() {
    let tmp = tempfile::tempdir().unwrap();
    // File alone violates the light cone (exit 3); the flag fixes it.
    std::fs::write(tmp.path().join("c.toml"), "[solve]\nt_final = 7.5\n").unwrap();
    let bad = logwave(&["run", "--config", "c.toml", "--out", "x"], tmp.path());
    assert_eq!(bad.status.code(), Some(3));
    let good = logwave(
        &[
            "run", "--config", "c.toml", "--t-final", "3.0", "--out", "y", "--n", "128",
        ],
        tmp.path(),
    );
    assert_eq!(good.status.code(), Some(0), "{}", stdout(&good));
}
