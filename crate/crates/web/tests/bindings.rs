use std::f64::consts::PI;

use robin_dce_web::{cavity_modes, flux_compare, negativity_compare, HalfLineDrive};

fn fig1(robin_length: f64) -> HalfLineDrive {
    HalfLineDrive::new(robin_length, 0.25, 0.155, 40.5, 0.0)
}

#[test]
fn flux_compare_short_robin_length_agrees() {
    let c = flux_compare(&fig1(0.44), 40, 1.0).unwrap();
    assert_eq!(c.kbar().len(), 40);
    for ((k, r), m) in c.kbar().iter().zip(c.robin()).zip(c.mirror()) {
        if (0.1..=0.9).contains(k) {
            assert!((r / m - 1.0).abs() < 0.05, "{k}: {r} vs {m}");
        }
    }
    assert!(c.total_robin() > 0.0 && c.total_mirror() > 0.0);
}

#[test]
fn negativity_scan_long_robin_length_favours_the_mirror() {
    let s = negativity_compare(&fig1(10.0), 20, 0.4).unwrap();
    assert_eq!(s.ratio().len(), 20);
    assert!(s.bhat_robin().iter().zip(s.bhat_mirror()).all(|(r, m)| m >= *r));
    assert!(s.negativity_robin().iter().all(|&n| n >= 0.0));
}

#[test]
fn ramped_drive_is_accepted() {
    let drive = HalfLineDrive::new(0.44, 0.25, 0.155, 81.0, 20.0);
    assert!(flux_compare(&drive, 5, 1.0).is_ok());
    let bad = HalfLineDrive::new(0.44, 0.25, 0.155, 10.0, 20.0);
    assert!(flux_compare(&bad, 5, 1.0).is_err());
}

#[test]
fn cavity_modes_in_the_dirichlet_limit() {
    let m = cavity_modes(1e-9, 1e-9, 5, 2.0).unwrap();
    for (i, (q, w)) in m.roots().iter().zip(m.frequencies()).enumerate() {
        assert!((q - (i + 1) as f64 * PI).abs() < 1e-6);
        assert!((w - q / 2.0).abs() < 1e-15);
    }
    assert!(m.residuals().iter().all(|r| r.abs() < 1e-12));
    assert!(cavity_modes(-1.0, 1.0, 5, 1.0).is_err());
}
