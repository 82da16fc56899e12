//! First-order Bogoliubov kernels for boundary modulations with arbitrary time profile.
//!
//! Every regime produces `α = c(k') (δ + Â)` and `β = c(k') B̂`, where the
//! phase `c(k') = e^{iω'(t_f − t_0)}` and `Â`, `B̂` are linear in the drive.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::drive::DriveProfile;
use crate::error::{invalid, Result};
use crate::mirror::AccelerationProfile;
use crate::modes::CavityModeTable;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SemiopenFar,
    SemiopenNearDirichlet,
    CavityFar,
    CavityNearDirichlet,
    RigidCavityMirror,
    MovingMirror,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::SemiopenFar => "semiopen_far",
            Regime::SemiopenNearDirichlet => "semiopen_near_dirichlet",
            Regime::CavityFar => "cavity_far",
            Regime::CavityNearDirichlet => "cavity_near_dirichlet",
            Regime::RigidCavityMirror => "rigid_cavity_mirror",
            Regime::MovingMirror => "moving_mirror",
        }
    }
}

/// First-order kernel over a continuum of wavenumbers.
pub trait ContinuumKernel: Send + Sync {
    fn regime(&self) -> Regime;
    fn a_hat(&self, k_prime: f64, k: f64) -> Result<C64>;
    fn b_hat(&self, k_prime: f64, k: f64) -> Result<C64>;
    /// Phase `c(k')` multiplying both coefficients; unit modulus.
    fn phase(&self, k_prime: f64) -> C64;
    /// Length of the drive window `t_f − t_0`.
    fn duration(&self) -> f64;
    /// Mode frequency `ω(k)`.
    fn frequency(&self, k: f64) -> f64 {
        k
    }
    /// Length scale beyond whose inverse the kernel is suppressed, if any.
    fn cutoff_length(&self) -> Option<f64> {
        None
    }
}

/// First-order kernel over discrete modes labelled `1, 2, …`.
pub trait DiscreteKernel: Send + Sync {
    fn regime(&self) -> Regime;
    fn a_hat(&self, m: usize, n: usize) -> Result<C64>;
    fn b_hat(&self, m: usize, n: usize) -> Result<C64>;
    fn frequency(&self, m: usize) -> Result<f64>;
    fn phase(&self, m: usize) -> Result<C64>;
}

fn check_positive(k_prime: f64, k: f64) -> Result<()> {
    if !(k > 0.0 && k_prime > 0.0) {
        return Err(invalid("k", format!("wavenumbers must be positive, got ({k_prime}, {k})")));
    }
    Ok(())
}

fn sqrt_factor(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `(Â, B̂)` for the half-line far from Dirichlet, `D = −Λ(1 + η(t))`.
pub fn semiopen_far_kernel(k_prime: f64, k: f64, lambda: f64, mu: f64, profile: &DriveProfile) -> Result<(C64, C64)> {
    check_positive(k_prime, k)?;
    let (w, wp) = (k.hypot(mu), k_prime.hypot(mu));
    let pre = lambda * k * k_prime / (PI * (w * wp).sqrt() * sqrt_factor(k * lambda) * sqrt_factor(k_prime * lambda));
    let a = -I * pre * profile.window_integral(wp - w)?;
    let b = I * pre * profile.window_integral(wp + w)?;
    Ok((a, b))
}

/// `(Â, B̂)` for the half-line near Dirichlet, `D = b(t)`.
pub fn semiopen_near_dirichlet_kernel(k_prime: f64, k: f64, mu: f64, profile_b: &DriveProfile) -> Result<(C64, C64)> {
    check_positive(k_prime, k)?;
    let (w, wp) = (k.hypot(mu), k_prime.hypot(mu));
    let pre = k * k_prime / (PI * (w * wp).sqrt());
    let a = I * pre * profile_b.window_integral(wp - w)?;
    let b = -I * pre * profile_b.window_integral(wp + w)?;
    Ok((a, b))
}

fn window_phase(omega: f64, profile: &DriveProfile) -> C64 {
    C64::from_polar(1.0, omega * profile.duration())
}

#[derive(Debug, Clone)]
pub struct SemiopenFarKernel {
    pub lambda: f64,
    pub mu: f64,
    pub drive: DriveProfile,
}

impl SemiopenFarKernel {
    pub fn new(lambda: f64, mu: f64, drive: DriveProfile) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !(mu >= 0.0) {
            return Err(invalid("mu", format!("must be non-negative, got {mu}")));
        }
        Ok(Self { lambda, mu, drive })
    }
}

impl ContinuumKernel for SemiopenFarKernel {
    fn regime(&self) -> Regime {
        Regime::SemiopenFar
    }
    fn a_hat(&self, k_prime: f64, k: f64) -> Result<C64> {
        Ok(semiopen_far_kernel(k_prime, k, self.lambda, self.mu, &self.drive)?.0)
    }
    fn b_hat(&self, k_prime: f64, k: f64) -> Result<C64> {
        Ok(semiopen_far_kernel(k_prime, k, self.lambda, self.mu, &self.drive)?.1)
    }
    fn phase(&self, k_prime: f64) -> C64 {
        window_phase(k_prime.hypot(self.mu), &self.drive)
    }
    fn duration(&self) -> f64 {
        self.drive.duration()
    }
    fn frequency(&self, k: f64) -> f64 {
        k.hypot(self.mu)
    }
    fn cutoff_length(&self) -> Option<f64> {
        Some(self.lambda)
    }
}

#[derive(Debug, Clone)]
pub struct SemiopenNearDirichletKernel {
    pub mu: f64,
    pub drive: DriveProfile,
}

impl SemiopenNearDirichletKernel {
    pub fn new(mu: f64, drive: DriveProfile) -> Result<Self> {
        if !(mu >= 0.0) {
            return Err(invalid("mu", format!("must be non-negative, got {mu}")));
        }
        Ok(Self { mu, drive })
    }
}

impl ContinuumKernel for SemiopenNearDirichletKernel {
    fn regime(&self) -> Regime {
        Regime::SemiopenNearDirichlet
    }
    fn a_hat(&self, k_prime: f64, k: f64) -> Result<C64> {
        Ok(semiopen_near_dirichlet_kernel(k_prime, k, self.mu, &self.drive)?.0)
    }
    fn b_hat(&self, k_prime: f64, k: f64) -> Result<C64> {
        Ok(semiopen_near_dirichlet_kernel(k_prime, k, self.mu, &self.drive)?.1)
    }
    fn phase(&self, k_prime: f64) -> C64 {
        window_phase(k_prime.hypot(self.mu), &self.drive)
    }
    fn duration(&self) -> f64 {
        self.drive.duration()
    }
    fn frequency(&self, k: f64) -> f64 {
        k.hypot(self.mu)
    }
}

fn parity(m: usize, n: usize) -> f64 {
    if (m + n).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(Â, B̂)` between cavity modes with roots `p`, `q`, far from Dirichlet.
pub fn cavity_far_kernel(
    table: &CavityModeTable,
    p: f64,
    q: f64,
    eta1: &DriveProfile,
    eta2: &DriveProfile,
) -> Result<(C64, C64)> {
    let (ip, iq) = (table.index_of(p)?, table.index_of(q)?);
    let (k1, k2) = (table.kappa1, table.kappa2);
    let length = table.length;
    let (wp, wq) = (p / length, q / length);
    let pre = (p * q).sqrt() / (length * (table.norm_factor(p) * table.norm_factor(q)).sqrt());
    let w1 = ((1.0 + k2 * k2 * p * p) * (1.0 + k2 * k2 * q * q)).sqrt();
    let w2 = parity(ip + 1, iq + 1) * ((1.0 + k1 * k1 * p * p) * (1.0 + k1 * k1 * q * q)).sqrt();
    let bracket = |omega: f64| -> Result<C64> {
        Ok(w1 * eta1.window_integral(omega)? - w2 * eta2.window_integral(omega)?)
    };
    let a = I * pre * bracket(wp - wq)?;
    let b = -I * pre * bracket(wp + wq)?;
    Ok((a, b))
}

/// `(Â, B̂)` between Dirichlet cavity modes `m`, `n`, for `D₁ = η₁(t)L`, `D₂ = η₂(t)L`.
pub fn cavity_near_dirichlet_kernel(
    m: usize,
    n: usize,
    length: f64,
    eta1: &DriveProfile,
    eta2: &DriveProfile,
) -> Result<(C64, C64)> {
    if m == 0 || n == 0 {
        return Err(invalid("m", "mode numbers start at 1"));
    }
    let (wm, wn) = (PI * m as f64 / length, PI * n as f64 / length);
    let pre = PI * ((m * n) as f64).sqrt() / length;
    let s = parity(m, n);
    let drive = |omega: f64| -> Result<C64> { Ok(eta1.window_integral(omega)? - s * eta2.window_integral(omega)?) };
    Ok((I * pre * drive(wm - wn)?, -I * pre * drive(wm + wn)?))
}

/// `(Â, B̂)` for a rigid Dirichlet cavity whose centre has proper acceleration `a(τ)`.
pub fn rigid_cavity_mirror_kernel(m: usize, n: usize, length: f64, accel: &AccelerationProfile) -> Result<(C64, C64)> {
    if m == 0 || n == 0 {
        return Err(invalid("m", "mode numbers start at 1"));
    }
    if (m + n).is_multiple_of(2) {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    let (wm, wn) = (PI * m as f64 / length, PI * n as f64 / length);
    let pre = 2.0 * PI * ((m * n) as f64).sqrt() / (length * length);
    let a = -I * pre / (wm - wn).powi(2) * accel.window_integral(wm - wn)?;
    let b = I * pre / (wm + wn).powi(2) * accel.window_integral(wm + wn)?;
    Ok((a, b))
}

#[derive(Debug, Clone)]
pub struct CavityFarKernel {
    pub table: CavityModeTable,
    pub eta1: DriveProfile,
    pub eta2: DriveProfile,
}

impl CavityFarKernel {
    fn root(&self, m: usize) -> Result<f64> {
        if m == 0 || m > self.table.len() {
            return Err(invalid("m", format!("mode {m} outside the table (1..={})", self.table.len())));
        }
        Ok(self.table.roots()[m - 1])
    }
}

impl DiscreteKernel for CavityFarKernel {
    fn regime(&self) -> Regime {
        Regime::CavityFar
    }
    fn a_hat(&self, m: usize, n: usize) -> Result<C64> {
        Ok(cavity_far_kernel(&self.table, self.root(m)?, self.root(n)?, &self.eta1, &self.eta2)?.0)
    }
    fn b_hat(&self, m: usize, n: usize) -> Result<C64> {
        Ok(cavity_far_kernel(&self.table, self.root(m)?, self.root(n)?, &self.eta1, &self.eta2)?.1)
    }
    fn frequency(&self, m: usize) -> Result<f64> {
        Ok(self.root(m)? / self.table.length)
    }
    fn phase(&self, m: usize) -> Result<C64> {
        Ok(window_phase(self.frequency(m)?, &self.eta1))
    }
}

#[derive(Debug, Clone)]
pub struct CavityNearDirichletKernel {
    pub length: f64,
    pub eta1: DriveProfile,
    pub eta2: DriveProfile,
}

impl DiscreteKernel for CavityNearDirichletKernel {
    fn regime(&self) -> Regime {
        Regime::CavityNearDirichlet
    }
    fn a_hat(&self, m: usize, n: usize) -> Result<C64> {
        Ok(cavity_near_dirichlet_kernel(m, n, self.length, &self.eta1, &self.eta2)?.0)
    }
    fn b_hat(&self, m: usize, n: usize) -> Result<C64> {
        Ok(cavity_near_dirichlet_kernel(m, n, self.length, &self.eta1, &self.eta2)?.1)
    }
    fn frequency(&self, m: usize) -> Result<f64> {
        if m == 0 {
            return Err(invalid("m", "mode numbers start at 1"));
        }
        Ok(PI * m as f64 / self.length)
    }
    fn phase(&self, m: usize) -> Result<C64> {
        Ok(window_phase(self.frequency(m)?, &self.eta1))
    }
}

#[derive(Debug, Clone)]
pub struct RigidCavityMirrorKernel {
    pub length: f64,
    pub accel: AccelerationProfile,
}

impl DiscreteKernel for RigidCavityMirrorKernel {
    fn regime(&self) -> Regime {
        Regime::RigidCavityMirror
    }
    fn a_hat(&self, m: usize, n: usize) -> Result<C64> {
        Ok(rigid_cavity_mirror_kernel(m, n, self.length, &self.accel)?.0)
    }
    fn b_hat(&self, m: usize, n: usize) -> Result<C64> {
        Ok(rigid_cavity_mirror_kernel(m, n, self.length, &self.accel)?.1)
    }
    fn frequency(&self, m: usize) -> Result<f64> {
        if m == 0 {
            return Err(invalid("m", "mode numbers start at 1"));
        }
        Ok(PI * m as f64 / self.length)
    }
    fn phase(&self, m: usize) -> Result<C64> {
        Ok(C64::from_polar(1.0, self.frequency(m)? * self.accel.duration()))
    }
}

/// One row of a sampled kernel grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub k_prime: f64,
    pub k: f64,
    pub a_hat: C64,
    pub b_hat: C64,
}

/// `Â`, `B̂` on the tensor grid `k_primes × ks`, row-major in `k'`.
///
/// Diagonal points where `Â` is distributional are reported with `Â = NaN`.
pub fn kernel_grid(kernel: &dyn ContinuumKernel, k_primes: &[f64], ks: &[f64]) -> Result<Vec<KernelSample>> {
    let pairs: Vec<(f64, f64)> = k_primes
        .iter()
        .flat_map(|&kp| ks.iter().map(move |&k| (kp, k)))
        .collect();
    pairs
        .par_iter()
        .map(|&(kp, k)| {
            let a_hat = match kernel.a_hat(kp, k) {
                Ok(a) => a,
                Err(_) if kp == k => C64::new(f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            Ok(KernelSample {
                k_prime: kp,
                k,
                a_hat,
                b_hat: kernel.b_hat(kp, k)?,
            })
        })
        .collect()
}
