use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use robin_dce::modes::{
    cavity_eigenvalues, cavity_equation, cavity_mode_eval, cavity_norm_factor, ground_mode, kg_inner_product,
    robin_phase_shift, semiopen_mode_eval, DirichletCavityMode, ModeFunction, RobinParameter, SemiopenMode,
};
use robin_dce::quad::QuadConfig;
use robin_dce::Complex64;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn phase_shift_examples() {
    assert_eq!(robin_phase_shift(1.0, RobinParameter::DIRICHLET), 0.0);
    assert_eq!(robin_phase_shift(1.0, RobinParameter::Neumann), FRAC_PI_2);
    assert!(close(robin_phase_shift(1.0, RobinParameter::Finite(-1.0)), FRAC_PI_4, 1e-15));
}

#[test]
fn semiopen_mode_examples() {
    let dirichlet = SemiopenMode::new(1.0, 0.0, RobinParameter::DIRICHLET).unwrap();
    assert_eq!(semiopen_mode_eval(&dirichlet, 0.0, 0.0, 0.0).norm(), 0.0);
    let peak = semiopen_mode_eval(&dirichlet, 0.0, 0.0, FRAC_PI_2);
    assert!((peak - Complex64::new(1.0 / PI.sqrt(), 0.0)).norm() < 1e-15);

    let massive = SemiopenMode::new(1.0, 1.0, RobinParameter::Finite(-1.0)).unwrap();
    let expect = FRAC_PI_4.sin() / (PI * 2f64.sqrt()).sqrt();
    assert!((semiopen_mode_eval(&massive, 0.0, 0.0, 0.0) - Complex64::new(expect, 0.0)).norm() < 1e-15);
}

#[test]
fn shifted_time_origin_is_a_pure_phase() {
    let m = SemiopenMode::new(0.7, 0.2, RobinParameter::Finite(-0.4)).unwrap();
    let shifted = semiopen_mode_eval(&m, 3.0, 5.0, 1.1);
    let direct = semiopen_mode_eval(&m, 0.0, 2.0, 1.1);
    assert!((shifted - direct).norm() < 1e-15);
}

#[test]
fn ground_mode_examples() {
    assert!(ground_mode(0.0, RobinParameter::Finite(-1.0)).is_none());
    let g = ground_mode(1.0, RobinParameter::Finite(2.0)).unwrap();
    assert!(close(g.frequency, 3f64.sqrt() / 2.0, 1e-15));
    assert!(ground_mode(1.0, RobinParameter::Finite(-2.0)).is_none());
    assert!(ground_mode(1.0, RobinParameter::Neumann).is_none());
}

#[test]
fn ground_mode_profile_is_normalized_under_the_half_line_integral() {
    // ∫₀^∞ 2Ω |φ|² dx = 2Ω D / (2√(μ²D² − 1)) = 1 for Ω = √(μ² − 1/D²)
    let g = ground_mode(1.5, RobinParameter::Finite(2.0)).unwrap();
    let v = kg_inner_product(&g, &g, (0.0, 60.0), 0.4, &QuadConfig::default()).unwrap();
    assert!((v.value - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{}", v.value);
}

#[test]
fn dirichlet_cavity_mode_is_normalized() {
    let f = DirichletCavityMode { n: 1, length: PI };
    let v = kg_inner_product(&f, &f, (0.0, PI), 0.0, &QuadConfig::default()).unwrap();
    assert!((v.value - Complex64::new(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn cavity_modes_are_orthonormal() {
    let table = cavity_eigenvalues(1.0, 1.0, 5).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (a, b) = (table.mode_at(i), table.mode_at(j));
            let v = kg_inner_product(&a, &b, (0.0, 1.0), 0.7, &QuadConfig::default()).unwrap().value;
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-8, "({i}, {j}): {v}");
        }
    }
}

#[test]
fn first_root_matches_bisection() {
    let q = cavity_eigenvalues(1.0, 1.0, 1).unwrap().roots()[0];
    let h = |q: f64| 2.0 * q * q.cos() - (q * q - 1.0) * q.sin();
    let (mut lo, mut hi) = (1e-9, PI - 1e-9);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if h(lo).signum() == h(mid).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(q > 0.0 && q < PI);
    assert!(close(q, lo, 1e-12));
}

#[test]
fn dirichlet_limit_of_roots() {
    let t = cavity_eigenvalues(1e-8, 1e-8, 10).unwrap();
    for (m, q) in t.roots().iter().enumerate() {
        assert!(close(*q, (m + 1) as f64 * PI, 1e-6));
    }
}

fn sign_change_count(k1: f64, k2: f64, lo: f64, hi: f64, samples: usize) -> usize {
    let g: Vec<f64> = (0..=samples)
        .map(|i| cavity_equation(k1, k2, lo + (hi - lo) * i as f64 / samples as f64))
        .collect();
    g.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
}

#[test]
fn asymmetric_kappa_gives_fifty_roots() {
    let t = cavity_eigenvalues(0.3, 0.7, 50).unwrap();
    assert_eq!(t.len(), 50);
    assert!(t.roots().windows(2).all(|w| w[1] > w[0]));
    for (m, &q) in t.roots().iter().enumerate() {
        let (lo, hi) = (m as f64 * PI, (m + 1) as f64 * PI);
        assert!(q > lo && q < hi);
        assert_eq!(sign_change_count(0.3, 0.7, lo, hi, 200), 1, "interval {m}");
        assert!(t.residual(q).abs() < 1e-12);
    }
}

#[test]
fn norm_factor_and_boundary_value() {
    for q in [0.5, 2.0, 7.3] {
        assert_eq!(cavity_norm_factor(0.0, 0.0, q), 1.0);
    }
    let (k1, k2) = (0.4, 1.3);
    let t = cavity_eigenvalues(k1, k2, 4).unwrap();
    for &q in t.roots() {
        let f = cavity_norm_factor(k1, k2, q);
        let pre = ((1.0 + k1 * k1 * q * q) * (1.0 + k2 * k2 * q * q) / (q * f)).sqrt();
        let delta = (k1 * q).atan();
        assert!(delta > 0.0 && delta < FRAC_PI_2);
        let v = cavity_mode_eval(&t, q, 0.0, 0.0).unwrap();
        assert!((v - Complex64::new(pre * delta.sin(), 0.0)).norm() < 1e-14);
    }
    assert!(cavity_mode_eval(&t, t.roots()[0], 0.0, 1.5).is_err());
    assert!(cavity_mode_eval(&t, 1.0, 0.0, 0.5).is_err());
}

#[test]
fn evaluated_mode_has_unit_norm() {
    let t = cavity_eigenvalues(0.4, 1.3, 3).unwrap().with_length(2.0).unwrap();
    for i in 0..3 {
        let m = t.mode_at(i);
        let v = kg_inner_product(&m, &m, (0.0, 2.0), 0.0, &QuadConfig::default()).unwrap().value;
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }
}

#[test]
fn modes_approach_dirichlet_modes_linearly() {
    let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let deviation = |eps: f64| {
        let t = cavity_eigenvalues(eps, eps, 3).unwrap();
        let mut worst = 0.0f64;
        for (i, &q) in t.roots().iter().enumerate() {
            let d = DirichletCavityMode {
                n: i as u32 + 1,
                length: 1.0,
            };
            for &x in &xs {
                let v = cavity_mode_eval(&t, q, 0.0, x).unwrap();
                worst = worst.max((v - d.value(0.0, x)).norm());
            }
        }
        worst
    };
    let d: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&e| deviation(e)).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    for (dev, eps) in d.iter().zip([1e-2, 1e-3, 1e-4]) {
        assert!(*dev < 20.0 * eps, "{dev} at {eps}");
    }
}

#[test]
fn table_text_round_trip() {
    let t = cavity_eigenvalues(0.3, 0.7, 6).unwrap();
    let mut buf = Vec::new();
    t.write_table(&mut buf).unwrap();
    let back = robin_dce::modes::CavityModeTable::read_table(buf.as_slice()).unwrap();
    assert_eq!(back.roots(), t.roots());
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(cavity_eigenvalues(0.0, 1.0, 3).is_err());
    assert!(cavity_eigenvalues(1.0, -1.0, 3).is_err());
    assert!(cavity_eigenvalues(1.0, 1.0, 0).is_err());
    assert!(SemiopenMode::new(-1.0, 0.0, RobinParameter::DIRICHLET).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_shift_satisfies_boundary_condition(d in -50.0f64..=0.0, k in prop::sample::select(vec![0.1, 1.0, 10.0])) {
        let delta = robin_phase_shift(k, RobinParameter::Finite(d));
        prop_assert!(delta.abs() < FRAC_PI_2);
        prop_assert!((delta.sin() + k * d * delta.cos()).abs() < 1e-14 * (1.0 + (k * d).abs()));
    }

    #[test]
    fn dispersion_relation(k in 1e-3f64..50.0, mu in 0.0f64..10.0) {
        let m = SemiopenMode::new(k, mu, RobinParameter::DIRICHLET).unwrap();
        prop_assert!((m.omega * m.omega - (k * k + mu * mu)).abs() <= 1e-14 * (k * k + mu * mu));
    }

    #[test]
    fn admissibility_matches_ground_mode_frequency(d in -5.0f64..5.0, mu in 0.0f64..3.0) {
        let p = RobinParameter::Finite(d);
        if d > 0.0 && d * mu > 1.0 {
            prop_assert!(p.is_admissible(mu));
            prop_assert!(ground_mode(mu, p).unwrap().frequency > 0.0);
        } else {
            prop_assert_eq!(p.is_admissible(mu), d <= 0.0);
            prop_assert!(ground_mode(mu, p).is_none());
        }
    }

    #[test]
    fn one_root_per_interval(k1 in 0.01f64..=10.0, k2 in 0.01f64..=10.0) {
        let t = cavity_eigenvalues(k1, k2, 20).unwrap();
        let scanned = sign_change_count(k1, k2, 1e-9, 20.0 * PI - 1e-9, 20 * 2000);
        prop_assert_eq!(scanned, 20);
        for (m, &q) in t.roots().iter().enumerate() {
            prop_assert!(q > m as f64 * PI && q < (m + 1) as f64 * PI);
            prop_assert!(t.residual(q).abs() < 1e-12);
            prop_assert_eq!(t.parity_index(q).unwrap(), t.parity_index(t.roots()[0]).unwrap() + m as i64);
        }
    }
}
