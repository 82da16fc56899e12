use std::f64::consts::PI;

use proptest::prelude::*;
use robin_dce::modes::{cavity_eigenvalues, RobinParameter};
use robin_dce::quad::QuadConfig;
use robin_dce::sudden::{
    cavity_frequency_shift_far, cavity_frequency_shift_near_dirichlet, cavity_near_dirichlet_matrix,
    cavity_sudden_far, cavity_sudden_far_order, cavity_sudden_near_dirichlet, semiopen_sudden_exact,
    semiopen_sudden_far, semiopen_sudden_near_dirichlet, DeltaPlusKernel, Order, SemiopenPerturbative,
};

#[test]
fn unchanged_parameter_is_the_identity() {
    for d in [RobinParameter::Finite(-0.7), RobinParameter::DIRICHLET, RobinParameter::Neumann] {
        let s = semiopen_sudden_exact(1.3, 0.6, d, d, 0.0).unwrap();
        assert_eq!(s.beta, 0.0);
        assert_eq!(s.alpha.pv_coeff, 0.0);
        let diag = semiopen_sudden_exact(0.6, 0.6, d, d, 0.0).unwrap();
        assert_eq!(diag.alpha.delta_coeff, 1.0);
    }
}

#[test]
fn exact_beta_from_phase_shifts() {
    // β = sin δ sin δ' (1/D' − 1/D) / (π √(ωω') (ω + ω'))
    let (kp, k, mu): (f64, f64, f64) = (0.8, 1.7, 0.3);
    let (d, dp): (f64, f64) = (-0.6, -0.9);
    let (w, wp) = (k.hypot(mu), kp.hypot(mu));
    let (delta, delta_p) = ((-k * d).atan(), (-kp * dp).atan());
    let expect = delta.sin() * delta_p.sin() * (1.0 / dp - 1.0 / d) / (PI * (w * wp).sqrt() * (w + wp));
    let s = semiopen_sudden_exact(kp, k, RobinParameter::Finite(d), RobinParameter::Finite(dp), mu).unwrap();
    assert!((s.beta - expect).abs() < 1e-14);
    assert!((s.alpha.pv_coeff - expect * (w + wp)).abs() < 1e-14);
}

#[test]
fn dirichlet_endpoints_use_the_limiting_form() {
    // D = 0: sin δ / D → −k cos δ = −k
    let (kp, k, dp): (f64, f64, f64) = (1.1, 0.4, -0.5);
    let delta_p = (-kp * dp).atan();
    let expect = delta_p.sin() * k / (PI * (k * kp).sqrt() * (k + kp));
    let s = semiopen_sudden_exact(kp, k, RobinParameter::DIRICHLET, RobinParameter::Finite(dp), 0.0).unwrap();
    assert!((s.beta - expect).abs() < 1e-14, "{} vs {expect}", s.beta);
    assert!(s.beta.is_finite());
}

#[test]
fn inadmissible_parameters_are_rejected() {
    assert!(semiopen_sudden_exact(1.0, 1.0, RobinParameter::Finite(0.5), RobinParameter::Finite(-1.0), 0.0).is_err());
    assert!(semiopen_sudden_exact(-1.0, 1.0, RobinParameter::Finite(-1.0), RobinParameter::Finite(-1.0), 0.0).is_err());
}

#[test]
fn exact_agrees_with_second_order_expansion() {
    let ex = semiopen_sudden_exact(1.0, 1.0, RobinParameter::Finite(-1.0), RobinParameter::Finite(-1.1), 0.0).unwrap();
    let o2 = semiopen_sudden_far(1.0, 1.0, 1.0, 0.1, 0.0, Order::Second).unwrap();
    assert!(((ex.beta - o2.beta) / ex.beta).abs() < 0.03);
}

#[test]
fn exact_minus_first_order_is_second_order() {
    let residual = |eta: f64| {
        let ex = semiopen_sudden_exact(
            2.0,
            1.0,
            RobinParameter::Finite(-1.0),
            RobinParameter::Finite(-(1.0 + eta)),
            0.0,
        )
        .unwrap();
        (ex.beta - semiopen_sudden_far(2.0, 1.0, 1.0, eta, 0.0, Order::First).unwrap().beta).abs()
    };
    let r = [residual(0.08), residual(0.04), residual(0.02)];
    for w in r.windows(2) {
        assert!((w[0] / w[1] - 4.0).abs() <= 0.6, "{r:?}");
    }
}

#[test]
fn zero_strength_is_the_identity() {
    let far = semiopen_sudden_far(0.5, 1.5, 2.0, 0.0, 0.0, Order::Second).unwrap();
    assert_eq!((far.beta, far.alpha.pv_coeff, far.alpha.delta_coeff), (0.0, 0.0, 1.0));
    let near = semiopen_sudden_near_dirichlet(0.5, 1.5, 0.0, 0.0, Order::Second).unwrap();
    assert_eq!((near.beta, near.alpha.pv_coeff), (0.0, 0.0));
}

#[test]
fn near_dirichlet_example() {
    let s = semiopen_sudden_near_dirichlet(1.0, 1.0, 0.01, 0.0, Order::First).unwrap();
    assert!((s.beta + 0.01 / (2.0 * PI)).abs() < 1e-16);
}

#[test]
fn cavity_near_dirichlet_example() {
    let (_, beta) = cavity_sudden_near_dirichlet(1, 2, 0.01, 0.0, Order::First).unwrap();
    assert!((beta + 0.01 * 2f64.sqrt() / 3.0).abs() < 1e-16);
    assert!(cavity_sudden_near_dirichlet(0, 2, 0.01, 0.0, Order::First).is_err());
}

#[test]
fn rigid_translation_does_not_shift_frequencies() {
    for m in 1..6 {
        assert_eq!(cavity_frequency_shift_near_dirichlet(m, 0.02, 0.02, 3.0), PI * m as f64 / 3.0);
    }
    let t = cavity_eigenvalues(0.8, 0.8, 4).unwrap().with_length(2.0).unwrap();
    for &p in t.roots() {
        assert_eq!(cavity_frequency_shift_far(&t, p, 0.0, 0.0).unwrap(), p / 2.0);
        let same = cavity_frequency_shift_far(&t, p, 0.03, 0.03).unwrap();
        assert!((same - p / 2.0).abs() < 1e-15);
    }
}

#[test]
fn unchanged_cavity_is_the_identity() {
    let t = cavity_eigenvalues(0.5, 2.0, 6).unwrap();
    let m = cavity_sudden_far(&t, 0.0, 0.0);
    for i in 0..6 {
        for j in 0..6 {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_eq!(m.alpha[(i, j)].re, expect);
            assert_eq!(m.beta[(i, j)].norm(), 0.0);
        }
    }
    assert!(cavity_sudden_far_order(&t, 0.01, 0.0, Order::Second).is_err());
}

#[test]
fn far_cavity_reduces_to_near_dirichlet() {
    let t = cavity_eigenvalues(1e-10, 1e-10, 8).unwrap();
    let far = cavity_sudden_far(&t, 0.01, 0.007);
    let near = cavity_near_dirichlet_matrix(8, 0.01, 0.007, Order::First).unwrap();
    assert!((&far.alpha - &near.alpha).camax() < 1e-8);
    assert!((&far.beta - &near.beta).camax() < 1e-8);
}

#[test]
fn far_half_line_reduces_to_near_dirichlet() {
    let (b, lambda) = (0.03, 1e-7);
    for (kp, k) in [(0.4, 1.2), (2.0, 0.3), (1.0, 1.0)] {
        let far = semiopen_sudden_far(kp, k, lambda, -b / lambda, 0.0, Order::First).unwrap();
        let near = semiopen_sudden_near_dirichlet(kp, k, b, 0.0, Order::First).unwrap();
        assert!((far.beta - near.beta).abs() < 1e-10);
        assert!((far.alpha.pv_coeff - near.alpha.pv_coeff).abs() < 1e-10);
    }
}

#[test]
fn delta_plus_kernel_against_a_smooth_test_function() {
    // α = δ(k − k') only when the change is trivial
    let k = DeltaPlusKernel::exact(RobinParameter::Finite(-1.0), RobinParameter::Finite(-1.0), 0.0).unwrap();
    let v = k.integrate_against(1.0, |x| (-x * x).exp(), (0.2, 1.8), &QuadConfig::default()).unwrap();
    assert!((v.value - (-1.0f64).exp()).abs() < 1e-14);

    // the pv part against an odd function about k' reduces to ∫ c h (ω+ω')/(k+k') dk/(k−k')
    let terms = SemiopenPerturbative::near_dirichlet(0.05, 0.0);
    let pk = DeltaPlusKernel::perturbative(terms, Order::First);
    let h = |x: f64| x - 1.0;
    let got = pk.integrate_against(1.0, h, (0.5, 1.5), &QuadConfig::default()).unwrap().value;
    // h(k)/(ω−ω') = 1 with μ = 0, so only c(1, k) = −b√k/π survives
    let expect = -0.05 / PI * (2.0 / 3.0) * (1.5f64.powf(1.5) - 0.5f64.powf(1.5));
    assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    assert!(pk.integrate_against(2.0, h, (0.5, 1.5), &QuadConfig::default()).is_err());
}

fn first_order_symmetric(m: &robin_dce::sudden::DiscreteBogoliubovMatrix) -> (f64, f64) {
    let n = m.size();
    let mut anti = 0.0f64;
    let mut sym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a1 = |i: usize, j: usize| m.alpha[(i, j)].re - if i == j { 1.0 } else { 0.0 };
            anti = anti.max((a1(i, j) + a1(j, i)).abs());
            sym = sym.max((m.beta[(i, j)] - m.beta[(j, i)]).norm());
        }
    }
    (anti, sym)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sign_flip_flips_first_order_beta(b in -0.2f64..0.2, kp in 0.05f64..5.0, k in 0.05f64..5.0, mu in 0.0f64..2.0) {
        let plus = semiopen_sudden_near_dirichlet(kp, k, b, mu, Order::First).unwrap();
        let minus = semiopen_sudden_near_dirichlet(kp, k, -b, mu, Order::First).unwrap();
        prop_assert_eq!(plus.beta, -minus.beta);
        prop_assert_eq!(plus.alpha.pv_coeff, -minus.alpha.pv_coeff);
    }

    #[test]
    fn first_order_half_line_identities(eta in -0.2f64..0.2, lambda in 0.05f64..20.0, kp in 0.05f64..5.0, k in 0.05f64..5.0, mu in 0.0f64..2.0) {
        let t = SemiopenPerturbative::far(lambda, eta, mu);
        // α₁ = c P/(ω−ω') is antisymmetric iff c is symmetric; β₁ symmetric
        prop_assert!((t.pv1(kp, k) - t.pv1(k, kp)).abs() <= 1e-15 * t.pv1(kp, k).abs().max(1e-300));
        prop_assert!((t.beta1(kp, k) - t.beta1(k, kp)).abs() <= 1e-15 * t.beta1(kp, k).abs().max(1e-300));
    }

    #[test]
    fn first_order_cavity_identities(k1 in 0.01f64..5.0, k2 in 0.01f64..5.0, e1 in -0.05f64..0.05, e2 in -0.05f64..0.05) {
        let t = cavity_eigenvalues(k1, k2, 12).unwrap();
        let (anti, sym) = first_order_symmetric(&cavity_sudden_far(&t, e1, e2));
        prop_assert!(anti < 1e-12 && sym < 1e-12, "{} {}", anti, sym);
        let near = cavity_near_dirichlet_matrix(12, e1, e2, Order::First).unwrap();
        let (anti, sym) = first_order_symmetric(&near);
        prop_assert!(anti < 1e-12 && sym < 1e-12);
    }

    #[test]
    fn swapping_the_walls_preserves_magnitudes(k1 in 0.01f64..5.0, k2 in 0.01f64..5.0, e1 in -0.05f64..0.05, e2 in -0.05f64..0.05) {
        let a = cavity_sudden_far(&cavity_eigenvalues(k1, k2, 10).unwrap(), e1, e2);
        let b = cavity_sudden_far(&cavity_eigenvalues(k2, k1, 10).unwrap(), e2, e1);
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = (a.beta[(i, j)].norm(), b.beta[(i, j)].norm());
                prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300), "({}, {}): {} vs {}", i, j, x, y);
            }
        }
    }
}
