use std::process::Command;

use hitchhike::harness::ResultTable;

fn hitchhike(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hitchhike")).args(args).output().expect("binary runs")
}

#[test]
fn het_compare_output_does_not_depend_on_workers() {
    let base = ["het-compare", "--alpha", "200", "--theta-grid", "0,1", "--rho-grid", "5", "--replicates", "200"];
    let one = hitchhike(&[&base[..], &["--workers", "1"]].concat());
    let three = hitchhike(&[&base[..], &["--workers", "3"]].concat());
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, three.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    assert!(text.starts_with("# mode: het-compare\n"));
    assert!(text.contains("\ntheta,rho,wf_mean,wf_se,eq12,eq14,n_replicates\n"));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("green.json");
    let status = hitchhike(&[
        "green-check",
        "--alpha",
        "50",
        "--theta-grid",
        "0,0.5",
        "--format",
        "json",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let table = ResultTable::from_json(&text).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.to_json().unwrap(), text);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "alpha = 300.0\ntheta_grid = [0.5]\nrho_grid = [2.0]\nreplicates = 5\n").unwrap();
    let out = hitchhike(&["het-compare", "--config", config.to_str().unwrap(), "--alpha", "150", "--curve"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"alpha\":150.0"), "{text}");
    assert!(text.contains("\"theta_grid\":[0.5]"), "{text}");
}

#[test]
fn config_errors_exit_with_one() {
    let empty_grid = hitchhike(&["het-compare", "--rho-grid", ""]);
    assert_eq!(empty_grid.status.code(), Some(1));
    let zero_reps = hitchhike(&["fixation-times", "--replicates", "0"]);
    assert_eq!(zero_reps.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "alpah = 3.0\n").unwrap();
    let unknown_key = hitchhike(&["green-check", "--config", bad.to_str().unwrap()]);
    assert_eq!(unknown_key.status.code(), Some(1));
    assert!(!unknown_key.stderr.is_empty());
}
