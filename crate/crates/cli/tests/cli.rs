//! End-to-end runs of the binary: determinism, config layering, exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_rieszcap");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_disk(dir: &Path) {
    fs::write(
        dir.join("disk.body"),
        "type = ball\ncenter = 0, 0\nradius = 1\n",
    )
    .unwrap();
}

fn read_out_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical_without_timestamp() {
    let tmp = TempDir::new().unwrap();
    write_disk(tmp.path());
    let args = [
        "capacity",
        "--body",
        "disk.body",
        "--cell-size",
        "0.1",
        "--out",
        "run",
        "--no-timestamp",
    ];

    let first = run(tmp.path(), &args);
    assert!(first.status.success(), "{first:?}");
    let snapshot = read_out_files(&tmp.path().join("run"));
    assert!(snapshot.iter().any(|(name, _)| name == "report.json"));
    assert!(snapshot.iter().any(|(name, _)| name == "capacity.csv"));
    assert!(snapshot.iter().any(|(name, _)| name == "radial.dat"));

    let second = run(tmp.path(), &args);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(snapshot, read_out_files(&tmp.path().join("run")));

    let report = fs::read_to_string(tmp.path().join("run/report.json")).unwrap();
    assert!(!report.contains("timestamp_unix"));
}

#[test]
fn timestamp_appears_unless_suppressed() {
    let tmp = TempDir::new().unwrap();
    write_disk(tmp.path());
    let out = run(
        tmp.path(),
        &[
            "capacity",
            "--body",
            "disk.body",
            "--cell-size",
            "0.1",
            "--out",
            "run",
        ],
    );
    assert!(out.status.success());
    let report = fs::read_to_string(tmp.path().join("run/report.json")).unwrap();
    assert!(report.contains("timestamp_unix"));
}

#[test]
fn flags_override_config_file_values() {
    let tmp = TempDir::new().unwrap();
    write_disk(tmp.path());
    fs::write(
        tmp.path().join("run.cfg"),
        "body = disk.body\ncell-size = 0.2\nout = fromfile\nno-timestamp = true\n",
    )
    .unwrap();

    let out = run(
        tmp.path(),
        &[
            "capacity",
            "--config",
            "run.cfg",
            "--cell-size",
            "0.1",
            "--out",
            "fromflag",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    assert!(tmp.path().join("fromflag/report.json").exists());
    assert!(!tmp.path().join("fromfile").exists());

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("fromflag/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["config"]["params"]["cell_size"], 0.1);
}

#[test]
fn unknown_config_key_is_rejected_by_name() {
    let tmp = TempDir::new().unwrap();
    write_disk(tmp.path());
    fs::write(
        tmp.path().join("bad.cfg"),
        "body = disk.body\ncells-size = 0.1\n",
    )
    .unwrap();
    let out = run(tmp.path(), &["capacity", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cells-size"), "{err}");
    assert!(err.contains("accepted keys"), "{err}");
}

#[test]
fn print_config_echoes_resolved_values_and_runs_nothing() {
    let tmp = TempDir::new().unwrap();
    write_disk(tmp.path());
    let out = run(
        tmp.path(),
        &[
            "capacity",
            "--body",
            "disk.body",
            "--out",
            "never",
            "--print-config",
        ],
    );
    assert!(out.status.success());
    let echoed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is the resolved config");
    assert_eq!(echoed["params"]["cell_size"], 0.04);
    assert_eq!(echoed["globals"]["directions"], 256);
    assert!(!tmp.path().join("never").exists());
}

#[test]
fn operational_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["capacity", "--body", "missing.body"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.body"));
}

#[test]
fn findings_exit_two() {
    let tmp = TempDir::new().unwrap();
    write_disk(tmp.path());
    // A score floor above 1 cannot be met, so the run completes and then
    // reports a finding.
    let out = run(
        tmp.path(),
        &[
            "levelsets",
            "--body",
            "disk.body",
            "--cell-size",
            "0.06",
            "--levels",
            "0.5",
            "--score-floor",
            "1.5",
            "--out",
            "run",
            "--no-timestamp",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("finding:"));
    assert!(tmp.path().join("run/report.json").exists());
}

#[test]
fn help_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("capacity"));
}
