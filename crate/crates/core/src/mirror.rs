//! Dirichlet mirrors with prescribed proper acceleration.
//!
//! The perturbative kernel is driven by an acceleration history `a(τ)`; the
//! exact coefficients for uniform acceleration come from a contour integral.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::continuous::{ContinuumKernel, Regime};
use crate::drive::DriveProfile;
use crate::error::{invalid, Result};
use crate::quad::{integrate_points, integrate_to_infinity, Estimate, QuadConfig};

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub const NEGATIVE_ACCELERATION_WARNING: &str =
    "acceleration changes sign; the uniformly accelerated mirror picture does not apply";

/// Delta-function contribution `weight · δ(τ − time)` to an acceleration history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impulse {
    pub time: f64,
    pub weight: f64,
}

/// Proper acceleration on `[τ0, τf]`: a smooth part plus impulses at instants inside the window.
#[derive(Debug, Clone)]
pub struct AccelerationProfile {
    smooth: DriveProfile,
    impulses: Vec<Impulse>,
    nonnegative: bool,
}

impl AccelerationProfile {
    pub fn new(smooth: DriveProfile, impulses: Vec<Impulse>) -> Result<Self> {
        for imp in &impulses {
            if !(imp.time >= smooth.t0() && imp.time <= smooth.tf() && imp.weight.is_finite()) {
                return Err(invalid(
                    "impulse",
                    format!("impulse at {} outside [{}, {}]", imp.time, smooth.t0(), smooth.tf()),
                ));
            }
        }
        let nonnegative = is_nonnegative(&smooth, &impulses);
        Ok(Self {
            smooth,
            impulses,
            nonnegative,
        })
    }

    /// Constant acceleration `a` on `[τ0, τf]`.
    pub fn constant(a: f64, tau0: f64, tauf: f64) -> Result<Self> {
        let piece = crate::drive::ExpPiece {
            start: 0.0,
            end: tauf - tau0,
            terms: vec![crate::drive::ExpTerm::new(C64::new(a, 0.0), 0.0)],
        };
        Self::new(DriveProfile::from_pieces(tau0, tauf, vec![piece])?, Vec::new())
    }

    /// `scale · (η̈ + η̇(τ0⁺) δ(τ − τ0) − η̇(τf⁻) δ(τ − τf))`.
    fn matching(eta: &DriveProfile, scale: f64) -> Result<Self> {
        let velocity = eta.derivative()?;
        let smooth = velocity.derivative()?.scaled(scale);
        let (v0, vf) = velocity.endpoint_values();
        let impulses = vec![
            Impulse {
                time: eta.t0(),
                weight: scale * v0,
            },
            Impulse {
                time: eta.tf(),
                weight: -scale * vf,
            },
        ];
        Self::new(smooth, impulses)
    }

    /// Acceleration reproducing the far-from-Dirichlet half-line drive `D = −Λ(1 + η)`.
    pub fn matching_semiopen_far(eta: &DriveProfile, lambda: f64) -> Result<Self> {
        Self::matching(eta, -lambda)
    }

    /// Acceleration reproducing the near-Dirichlet half-line drive `D = b`.
    pub fn matching_near_dirichlet(b: &DriveProfile) -> Result<Self> {
        Self::matching(b, 1.0)
    }

    /// Acceleration of a rigid cavity whose walls follow `D₁ = D₂ = η₁L`.
    pub fn matching_rigid_cavity(eta1: &DriveProfile, length: f64) -> Result<Self> {
        Self::matching(eta1, length)
    }

    pub fn tau0(&self) -> f64 {
        self.smooth.t0()
    }

    pub fn tauf(&self) -> f64 {
        self.smooth.tf()
    }

    pub fn duration(&self) -> f64 {
        self.smooth.duration()
    }

    pub fn smooth_part(&self) -> &DriveProfile {
        &self.smooth
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    /// Whether `a(τ) ≥ 0` throughout, impulses included.
    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn validity_warning(&self) -> Option<&'static str> {
        (!self.nonnegative).then_some(NEGATIVE_ACCELERATION_WARNING)
    }

    /// `∫ e^{−iΩ(τ − τ0)} a(τ) dτ`.
    pub fn window_integral(&self, omega: f64) -> Result<C64> {
        let mut total = self.smooth.window_integral(omega)?;
        for imp in &self.impulses {
            total += imp.weight * C64::from_polar(1.0, -omega * (imp.time - self.tau0()));
        }
        Ok(total)
    }
}

fn is_nonnegative(smooth: &DriveProfile, impulses: &[Impulse]) -> bool {
    let samples = smooth.sample_grid(4097);
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = -1e-12 * scale;
    samples.iter().all(|&v| v >= floor) && impulses.iter().all(|i| i.weight >= 0.0)
}

/// `(Â, B̂)` for a mirror with acceleration `a(τ)`; `Â` needs `k ≠ k'`.
pub fn moving_mirror_kernel(k_prime: f64, k: f64, accel: &AccelerationProfile) -> Result<(C64, C64)> {
    Ok((moving_mirror_a_hat(k_prime, k, accel)?, moving_mirror_b_hat(k_prime, k, accel)?))
}

fn moving_mirror_a_hat(k_prime: f64, k: f64, accel: &AccelerationProfile) -> Result<C64> {
    check_pair(k_prime, k)?;
    if k == k_prime {
        return Err(invalid("k", "the mirror Â kernel is singular at k = k'"));
    }
    let d = k - k_prime;
    Ok(-I * (k * k_prime).sqrt() / (PI * d * d) * accel.window_integral(k_prime - k)?)
}

fn moving_mirror_b_hat(k_prime: f64, k: f64, accel: &AccelerationProfile) -> Result<C64> {
    check_pair(k_prime, k)?;
    let s = k + k_prime;
    Ok(I * (k * k_prime).sqrt() / (PI * s * s) * accel.window_integral(k_prime + k)?)
}

fn check_pair(k_prime: f64, k: f64) -> Result<()> {
    if !(k > 0.0 && k_prime > 0.0 && k.is_finite() && k_prime.is_finite()) {
        return Err(invalid("k", format!("wavenumbers must be positive, got ({k_prime}, {k})")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MovingMirrorKernel {
    pub accel: AccelerationProfile,
}

impl MovingMirrorKernel {
    pub fn warning(&self) -> Option<&'static str> {
        self.accel.validity_warning()
    }
}

impl ContinuumKernel for MovingMirrorKernel {
    fn regime(&self) -> Regime {
        Regime::MovingMirror
    }
    fn a_hat(&self, k_prime: f64, k: f64) -> Result<C64> {
        moving_mirror_a_hat(k_prime, k, &self.accel)
    }
    fn b_hat(&self, k_prime: f64, k: f64) -> Result<C64> {
        moving_mirror_b_hat(k_prime, k, &self.accel)
    }
    fn phase(&self, k_prime: f64) -> C64 {
        C64::from_polar(1.0, k_prime * self.accel.duration())
    }
    fn duration(&self) -> f64 {
        self.accel.duration()
    }
}

/// Exact coefficients between inertial in- and out-modes for uniform acceleration.
#[derive(Debug, Clone, Copy)]
pub struct MirrorCoefficients {
    pub alpha: Estimate<f64>,
    pub beta: Estimate<f64>,
}

/// Exact `α(k', k)`, `β(k', k)` for a mirror with constant proper acceleration `a`.
///
/// `regulator` is the convergence factor `ε` in `e^{−ε(y−1)/a}`; `None` picks `1e−12 k`.
pub fn uniform_mirror_exact(k_prime: f64, k: f64, a: f64, regulator: Option<f64>) -> Result<MirrorCoefficients> {
    check_pair(k_prime, k)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a", format!("acceleration must be positive, got {a}")));
    }
    let eps = regulator.unwrap_or(1e-12 * k);
    if !(eps >= 0.0) {
        return Err(invalid("regulator", format!("must be non-negative, got {eps}")));
    }
    let pre = (k_prime / k).sqrt() / (PI * a);
    let finish = |j: Estimate<C64>| Estimate {
        value: pre * j.value.re,
        error: pre * j.error,
        evaluations: j.evaluations,
    };
    Ok(MirrorCoefficients {
        alpha: finish(mirror_integral(k_prime, k, a, eps, -1.0)?),
        beta: finish(mirror_integral(k_prime, k, a, eps, 1.0)?),
    })
}

/// `∫₁^∞ dy y^{σik'/a − 1} e^{i(k + iε)(y − 1)/a}` along a steepest-descent-friendly contour.
fn mirror_integral(k_prime: f64, k: f64, a: f64, eps: f64, sign: f64) -> Result<Estimate<C64>> {
    mirror_integral_turning(k_prime, k, a, eps, sign, 2.0)
}

fn mirror_integral_turning(k_prime: f64, k: f64, a: f64, eps: f64, sign: f64, turn: f64) -> Result<Estimate<C64>> {
    let p = C64::new(-eps, k) / a;
    let expo = C64::new(-1.0, sign * k_prime / a);
    let h = move |y: C64| (expo * y.ln() + p * (y - 1.0)).exp();
    let cfg = QuadConfig::new(1e-16, 1e-13);
    let scale = a / k;

    // Vertical ray from `start` upward, in units of the decay length a/k.
    let ray = |start: f64| -> Result<Estimate<C64>> {
        let est = integrate_to_infinity(|u: f64| I * scale * h(C64::new(start, scale * u)), 0.0, &cfg)?;
        Ok(est)
    };

    if sign > 0.0 || k_prime <= k {
        return ray(1.0);
    }
    // Stationary phase at y = k'/k on the real axis: integrate past it before turning.
    let top = turn * k_prime / k;
    let phase_span = (k_prime / a) * top.ln() + (k / a) * (top - 1.0);
    let segments = ((phase_span / PI).ceil() as usize).clamp(1, 200_000) + 1;
    let points: Vec<f64> = (0..=segments)
        .map(|i| 1.0 + (top - 1.0) * i as f64 / segments as f64)
        .collect();
    let real = integrate_points(|y: f64| h(C64::new(y, 0.0)), &points, &cfg)?;
    let vertical = ray(top)?;
    Ok(Estimate {
        value: real.value + vertical.value,
        error: real.error + vertical.error,
        evaluations: real.evaluations + vertical.evaluations,
    })
}

/// Leading small-acceleration coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSmallA {
    /// Off-diagonal part of `α`; the kernel has a cubic pole at `k = k'`.
    pub alpha: f64,
    pub beta: f64,
}

pub fn mirror_small_a(k_prime: f64, k: f64, a: f64) -> Result<MirrorSmallA> {
    check_pair(k_prime, k)?;
    if k == k_prime {
        return Err(invalid("k", "the off-diagonal α term is singular at k = k'"));
    }
    let root = (k * k_prime).sqrt();
    Ok(MirrorSmallA {
        alpha: a * root / (PI * (k - k_prime).powi(3)),
        beta: mirror_small_a_beta(k_prime, k, a)?,
    })
}

pub fn mirror_small_a_beta(k_prime: f64, k: f64, a: f64) -> Result<f64> {
    check_pair(k_prime, k)?;
    Ok(a * (k * k_prime).sqrt() / (PI * (k + k_prime).powi(3)))
}
