//! End-to-end checks of the `wrsn` binary.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Command, Stdio};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_wrsn");

fn wrsn(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).env_clear().output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_empty_file_prints_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "empty.toml", "");
    let out = wrsn(&["validate", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: toml::Table = text.parse().unwrap();
    assert_eq!(doc["scenario"]["x_max"].as_float(), Some(100.0));
    assert_eq!(doc["scenario"]["n_sensors"].as_integer(), Some(100));
    assert_eq!(doc["scenario"]["episode_len"].as_integer(), Some(200));
    assert_eq!(
        doc["chargers"]["aav"]["charging"]["p0"].as_float(),
        Some(3.0)
    );
    assert_eq!(
        doc["chargers"]["sv"]["charging"]["d_max"].as_float(),
        Some(6.0)
    );
}

#[test]
fn validate_reports_bad_keys() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.toml", "[scenario]\ne_max = -2.0\n");
    let out = wrsn(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenario.e_max"));

    let cfg = write(&dir, "unknown.toml", "[scenario]\nflavour = 1\n");
    let out = wrsn(&["validate", "--config", &cfg]);
    assert!(out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("warning: unknown key `scenario.flavour`")
    );
}

#[test]
fn env_override_applies() {
    let out = Command::new(BIN)
        .args(["validate"])
        .env_clear()
        .env("WRSN_SCENARIO__N_SENSORS", "20")
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(doc["scenario"]["n_sensors"].as_integer(), Some(20));
}

#[test]
fn run_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let metrics = dir.path().join("m.csv");
    let m = metrics.to_str().unwrap();
    let out = wrsn(&[
        "run",
        "--config",
        "/nonexistent/cfg.toml",
        "--policy",
        "random",
        "--metrics-out",
        m,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = wrsn(&["run", "--policy", "ppo", "--metrics-out", m]);
    assert_eq!(out.status.code(), Some(2));
    let out = wrsn(&[
        "run",
        "--policy",
        "random",
        "--episodes",
        "0",
        "--metrics-out",
        m,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!metrics.exists());
}

#[test]
fn stationary_run_reports_zero_distance() {
    let dir = TempDir::new().unwrap();
    let metrics = dir.path().join("m.csv");
    let out = wrsn(&[
        "run",
        "--policy",
        "stationary",
        "--episodes",
        "1",
        "--seed",
        "0",
        "--metrics-out",
        metrics.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&metrics).unwrap();
    let header: Vec<_> = csv.lines().next().unwrap().split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == "total_distance_m")
        .unwrap();
    for row in csv.lines().skip(1) {
        assert_eq!(row.split(',').nth(col).unwrap(), "0", "{row}");
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("policy stationary"));
}

#[test]
fn metrics_match_golden_file() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let dir = TempDir::new().unwrap();
    let metrics = dir.path().join("m.csv");
    let traj = dir.path().join("t.csv");
    let out = wrsn(&[
        "run",
        "--config",
        golden.join("small.toml").to_str().unwrap(),
        "--policy",
        "greedy",
        "--episodes",
        "2",
        "--seed",
        "4",
        "--metrics-out",
        metrics.to_str().unwrap(),
        "--traj-out",
        traj.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        std::fs::read_to_string(&metrics).unwrap(),
        std::fs::read_to_string(golden.join("small_metrics.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read_to_string(&traj).unwrap(),
        std::fs::read_to_string(golden.join("small_trajectory.csv")).unwrap()
    );
}

#[test]
fn serve_stdio_answers_spec() {
    let mut child = Command::new(BIN)
        .args(["serve", "--stdio"])
        .env_clear()
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"cmd\":\"spec\"}\n{\"cmd\":\"close\"}\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let spec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(spec["obs_dim"], 305);
    assert_eq!(spec["n_agents"], 2);
}

#[test]
fn serve_port_zero_prints_bound_port() {
    let mut child = Command::new(BIN)
        .args(["serve", "--port", "0"])
        .env_clear()
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    let port: u16 = line.trim().rsplit(':').next().unwrap().parse().unwrap();
    assert!(line.starts_with("listening on 127.0.0.1:"));
    assert_ne!(port, 0);
}

#[test]
fn serve_flag_conflicts_exit_2() {
    assert_eq!(
        wrsn(&["serve", "--stdio", "--port", "5000"]).status.code(),
        Some(2)
    );
    assert_eq!(wrsn(&["serve"]).status.code(), Some(2));
}
