mod common;

use common::*;
use robin_dce_cli::scenario::{CavityBoundary, ParamValue, SemiopenBoundary, Setup};
use robin_dce_cli::units::Dimension;
use robin_dce_cli::{load_scenario, CliError};

#[test]
fn all_bundled_scenarios_load() {
    for name in BUNDLED {
        let s = bundled(name);
        assert_eq!(s.name, name);
    }
}

#[test]
fn fig1_left_carries_the_published_parameters() {
    let s = bundled("fig1_left");
    let d = &s.drives[0];
    assert_eq!(d.amplitude, 0.25);
    assert_eq!(d.omega_d(), Some(0.155));
    assert_eq!(d.tf - d.t0, 40.5);
    assert_eq!(
        s.setup,
        Setup::Semiopen {
            mass: 0.0,
            boundary: SemiopenBoundary::Far { robin_length: 0.44 }
        }
    );
    assert!(s.compare_mirror);
}

#[test]
fn fig1_right_differs_only_in_robin_length() {
    let (l, r) = (bundled("fig1_left"), bundled("fig1_right"));
    assert_eq!(r.drives, l.drives);
    assert_eq!(
        r.parameter("boundary.robin_length"),
        Some(&ParamValue::Quantity(10.0, Dimension::Length))
    );
}

#[test]
fn cavity_scenarios_have_two_drives() {
    for name in ["cavity_demo", "identities"] {
        let s = bundled(name);
        assert_eq!(s.drives.len(), 2, "{name}");
        assert!(matches!(
            s.setup,
            Setup::Cavity {
                boundary: CavityBoundary::NearDirichlet,
                ..
            }
        ));
    }
}

fn invalid_errors(result: robin_dce_cli::Result<robin_dce_cli::Scenario>) -> Vec<String> {
    match result {
        Err(CliError::Invalid { errors, .. }) => errors,
        Err(e) => panic!("expected validation errors, got {e}"),
        Ok(_) => panic!("expected validation errors"),
    }
}

#[test]
fn empty_file_reports_every_missing_section() {
    let dir = tempfile::tempdir().unwrap();
    let errors = invalid_errors(load_scenario(&write_scenario(dir.path(), "empty", "")));
    assert!(errors.len() >= 3, "{errors:?}");
    for section in ["[geometry]", "[boundary]", "[drive]"] {
        assert!(errors.iter().any(|e| e.contains(section)), "{section} missing from {errors:?}");
    }
}

#[test]
fn wrong_unit_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_FLUX.replace("\"0.44 mm\"", "\"0.44 s\"");
    let errors = invalid_errors(load_scenario(&write_scenario(dir.path(), "bad", &text)));
    assert_eq!(errors.len(), 1, "{errors:?}");
    assert!(errors[0].contains("boundary.robin_length"), "{}", errors[0]);
    assert!(errors[0].contains("unknown unit `s`"), "{}", errors[0]);
}

#[test]
fn frequency_given_as_length_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_FLUX.replace("\"0.155 /mm\"", "\"0.155 mm\"");
    let errors = invalid_errors(load_scenario(&write_scenario(dir.path(), "bad", &text)));
    assert!(errors[0].contains("drive.omega_d") && errors[0].contains("expected mm^-1"), "{errors:?}");
}

#[test]
fn syntax_errors_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "broken", "[geometry]\nkind = \"semiopen\"\nlength = \n");
    match load_scenario(&path) {
        Err(CliError::Parse { message, .. }) => assert!(message.contains("line 3"), "{message}"),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_a_read_error() {
    let err = load_scenario(std::path::Path::new("/nonexistent/x.scenario")).unwrap_err();
    assert!(matches!(err, CliError::Read { .. }));
}

#[test]
fn sampled_drive_reads_a_file_next_to_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let samples: String = (0..=200)
        .map(|j| format!("{}\n", 0.25 * (0.155 * j as f64 * 0.2025).sin()))
        .collect();
    std::fs::write(dir.path().join("eta.txt"), format!("# eta samples\n{samples}")).unwrap();
    let text = SMALL_FLUX.replace(
        "kind = \"sinusoid\"\nepsilon = 0.25\nomega_d = \"0.155 /mm\"\ntf = \"40.5 mm\"",
        "kind = \"sampled\"\ndt = \"0.2025 mm\"\nfile = \"eta.txt\"",
    );
    let s = load_scenario(&write_scenario(dir.path(), "sampled", &text)).unwrap();
    assert!((s.drives[0].tf - 40.5).abs() < 1e-12);
    assert_eq!(s.flux_omega_d(), None);
    assert_eq!(s.parameter("drive.sample_count"), Some(&ParamValue::Integer(201)));
}
