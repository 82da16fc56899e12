mod common;

use std::process::Command;

use common::*;

fn robin_dce() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robin-dce"))
}

#[test]
fn modes_command_writes_into_the_env_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let status = robin_dce()
        .env("ROBIN_DCE_OUT", dir.path())
        .args(["modes"])
        .arg(bundled_path("cavity_demo"))
        .status()
        .unwrap();
    assert!(status.success());
    let (_, rows) = read_csv(&dir.path().join("cavity_demo.modes.csv"));
    assert_eq!(rows.len(), 10);
    assert!(dir.path().join("cavity_demo.modes.manifest.json").exists());
}

#[test]
fn out_flag_beats_the_environment() {
    let (env_dir, flag_dir) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let status = robin_dce()
        .env("ROBIN_DCE_OUT", env_dir.path())
        .arg("--out")
        .arg(flag_dir.path())
        .args(["--threads", "1", "sudden"])
        .arg(bundled_path("identities"))
        .status()
        .unwrap();
    assert!(status.success());
    assert!(flag_dir.path().join("identities.sudden.csv").exists());
    assert!(!env_dir.path().join("identities.sudden.csv").exists());
}

#[test]
fn invalid_scenario_exits_nonzero_with_all_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "empty", "");
    let out = robin_dce().arg("--out").arg(dir.path()).arg("flux").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for section in ["[geometry]", "[boundary]", "[drive]"] {
        assert!(stderr.contains(section), "{stderr}");
    }
}

#[test]
fn numerical_failure_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "divergent", &divergent_flux());
    let out = robin_dce().arg("--out").arg(dir.path()).arg("flux").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("small.flux.manifest.json")).unwrap();
    assert!(manifest.contains("\"status\": \"error\""));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn k_max_override_rejects_lengths() {
    let out = robin_dce()
        .args(["--k-max-override", "3 mm", "flux"])
        .arg(bundled_path("fig1_left"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/mm"));
}

#[test]
fn sweep_subcommand_parses_comma_separated_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "small", SMALL_FLUX);
    let out = robin_dce()
        .arg("--out")
        .arg(dir.path())
        .args(["sweep", "--axis", "drive.epsilon", "--values", "0.1,0.2", "--command", "negativity"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_csv(&dir.path().join("small.sweep.negativity.csv"));
    assert_eq!(rows.len(), 2);
}
