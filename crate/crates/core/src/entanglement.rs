//! Two-mode Gaussian entanglement between uniform wavepackets of the output field.
//!
//! Quadratures are normalized so that the vacuum covariance matrix is the identity.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::continuous::ContinuumKernel;
use crate::error::{invalid, Error, Result};
use crate::quad::GaussRule;

/// Two uniform wavepackets `f = 1/√Δk` on `[center ± Δk/2]` and `[partner ± Δk/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketPair {
    pub center: f64,
    pub partner: f64,
    pub width: f64,
}

impl WavepacketPair {
    pub fn new(center: f64, partner: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("delta_k", format!("must be positive, got {width}")));
        }
        if !(center > width / 2.0 && partner > width / 2.0) {
            return Err(invalid("k", "packet supports must lie in k > 0"));
        }
        if (center - partner).abs() <= width {
            return Err(invalid(
                "k",
                format!("packets at {center} and {partner} overlap for width {width}"),
            ));
        }
        Ok(Self { center, partner, width })
    }

    fn support(&self, which: Packet) -> (f64, f64) {
        let c = match which {
            Packet::Center => self.center,
            Packet::Partner => self.partner,
        };
        (c - self.width / 2.0, c + self.width / 2.0)
    }
}

#[derive(Clone, Copy)]
enum Packet {
    Center,
    Partner,
}

/// Covariance matrix ordered `(x₁, p₁, x₂, p₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTwoModeState {
    sigma: Matrix4<f64>,
}

const SYMMETRY_TOL: f64 = 1e-13;

impl GaussianTwoModeState {
    pub fn new(sigma: Matrix4<f64>) -> Result<Self> {
        let violation = (sigma - sigma.transpose()).amax();
        if !(violation <= SYMMETRY_TOL * sigma.amax().max(1.0)) {
            return Err(Error::NonSymmetricState { violation });
        }
        Ok(Self { sigma })
    }

    pub fn vacuum() -> Self {
        Self {
            sigma: Matrix4::identity(),
        }
    }

    pub fn sigma(&self) -> &Matrix4<f64> {
        &self.sigma
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Partially transposed covariance: the second mode's momentum flips sign.
    pub fn partial_transpose(&self) -> Matrix4<f64> {
        let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
        flip * self.sigma * flip
    }
}

fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    omega
}

/// Symplectic eigenvalues `(ν₋, ν₊)` of the partially transposed state.
pub fn ptranspose_symplectic_eigs(state: &GaussianTwoModeState) -> (f64, f64) {
    let m = symplectic_form() * state.partial_transpose();
    let mut mags: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    (0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3]))
}

/// `max(0, (1 − ν₋)/(2ν₋))`.
pub fn negativity(state: &GaussianTwoModeState) -> f64 {
    let (nu, _) = ptranspose_symplectic_eigs(state);
    negativity_from_eig(nu)
}

pub fn negativity_from_eig(nu: f64) -> f64 {
    ((1.0 - nu) / (2.0 * nu)).max(0.0)
}

/// Number of Gauss-Legendre nodes per packet dimension.
pub const PACKET_NODES: usize = 16;

fn check_kernel_symmetry(kernel: &dyn ContinuumKernel, pair: &WavepacketPair) -> Result<()> {
    let b1 = kernel.b_hat(pair.center, pair.partner)?;
    let b2 = kernel.b_hat(pair.partner, pair.center)?;
    let violation = (b1 - b2).norm();
    if violation > 1e-10 * b1.norm().max(b2.norm()) && violation > 1e-300 {
        return Err(Error::AsymmetricKernel { violation });
    }
    Ok(())
}

/// `(1/Δk) ∫∫ c(k) c(k') B̂(k, k') dk dk'` over the two supports.
fn packet_overlap(kernel: &dyn ContinuumKernel, pair: &WavepacketPair, first: Packet, second: Packet) -> Result<C64> {
    let rule = GaussRule::new(PACKET_NODES);
    let (a1, b1) = pair.support(first);
    let (a2, b2) = pair.support(second);
    let mut total = C64::new(0.0, 0.0);
    for (k, wk) in rule.mapped(a1, b1) {
        let ck = kernel.phase(k);
        for (kp, wkp) in rule.mapped(a2, b2) {
            total += wk * wkp * ck * kernel.phase(kp) * kernel.b_hat(k, kp)?;
        }
    }
    Ok(total / pair.width)
}

/// First-order 2×2 block from the packet overlap `j`.
fn block_from(j: C64) -> Matrix2<f64> {
    Matrix2::new(-2.0 * j.re, 2.0 * j.im, 2.0 * j.im, 2.0 * j.re)
}

/// `σ = I + σ¹` from the first-order kernel, with all wavepacket integrals done by quadrature.
pub fn covariance_first_order(kernel: &dyn ContinuumKernel, pair: &WavepacketPair) -> Result<GaussianTwoModeState> {
    check_kernel_symmetry(kernel, pair)?;
    let ja = packet_overlap(kernel, pair, Packet::Center, Packet::Center)?;
    let jb = packet_overlap(kernel, pair, Packet::Partner, Packet::Partner)?;
    let jc = packet_overlap(kernel, pair, Packet::Center, Packet::Partner)?;
    let mut sigma = Matrix4::identity();
    let mut a = sigma.fixed_view_mut::<2, 2>(0, 0);
    a += block_from(ja);
    let mut b = sigma.fixed_view_mut::<2, 2>(2, 2);
    b += block_from(jb);
    let c = block_from(jc);
    sigma.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
    sigma.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
    GaussianTwoModeState::new(sigma)
}

/// Sharply peaked closed form `Δk |B̂(center, partner)|`.
pub fn negativity_closed_form(kernel: &dyn ContinuumKernel, pair: &WavepacketPair) -> Result<f64> {
    Ok(pair.width * kernel.b_hat(pair.center, pair.partner)?.norm())
}

/// First-order negativity with the packet integral kept: `|(1/Δk)∫∫ c c B̂|`.
pub fn negativity_first_order(kernel: &dyn ContinuumKernel, pair: &WavepacketPair) -> Result<f64> {
    Ok(packet_overlap(kernel, pair, Packet::Center, Packet::Partner)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Packet width; `None` uses `ω_d/200`.
    pub delta_k: Option<f64>,
    pub points: usize,
    /// Upper end of the scan in units of `ω_d`.
    pub max_ratio: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            delta_k: None,
            points: 200,
            max_ratio: 0.4,
        }
    }
}

impl ScanConfig {
    pub fn width(&self, omega_d: f64) -> f64 {
        self.delta_k.unwrap_or(omega_d / 200.0)
    }

    /// `Δω/ω_d` samples from `Δk/ω_d` to `max_ratio`.
    pub fn grid(&self, omega_d: f64) -> Vec<f64> {
        let lo = self.width(omega_d) / omega_d;
        let n = self.points.max(2);
        (0..n)
            .map(|i| lo + (self.max_ratio - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub ratio: f64,
    pub bhat_robin: f64,
    pub bhat_mirror: f64,
    pub negativity_robin: f64,
    pub negativity_mirror: f64,
}

fn scan_pair(omega_d: f64, ratio: f64, width: f64) -> Result<WavepacketPair> {
    let dw = ratio * omega_d;
    WavepacketPair::new(0.5 * omega_d + dw, 0.5 * omega_d - dw, width)
}

/// `|B̂|` and the symplectic-path negativity along `k = ω_d/2 ± Δω` for two kernels.
pub fn negativity_scan(
    robin: &dyn ContinuumKernel,
    mirror: &dyn ContinuumKernel,
    omega_d: f64,
    cfg: &ScanConfig,
) -> Result<Vec<ScanRow>> {
    if !(omega_d > 0.0) {
        return Err(invalid("omega_d", format!("must be positive, got {omega_d}")));
    }
    if !(cfg.max_ratio < 0.5) {
        return Err(invalid("max_ratio", "scan must stay below ω_d/2"));
    }
    let width = cfg.width(omega_d);
    cfg.grid(omega_d)
        .par_iter()
        .map(|&ratio| {
            let pair = scan_pair(omega_d, ratio, width)?;
            let nr = negativity(&covariance_first_order(robin, &pair)?);
            let nm = negativity(&covariance_first_order(mirror, &pair)?);
            Ok(ScanRow {
                ratio,
                bhat_robin: robin.b_hat(pair.center, pair.partner)?.norm(),
                bhat_mirror: mirror.b_hat(pair.center, pair.partner)?.norm(),
                negativity_robin: nr,
                negativity_mirror: nm,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::SemiopenFarKernel;
    use crate::drive::DriveProfile;
    use crate::quad::GaussRule;

    fn kernel(eps: f64) -> SemiopenFarKernel {
        let d = DriveProfile::sinusoid(eps, 0.155, 0.0, 40.5).unwrap();
        SemiopenFarKernel::new(0.44, 0.0, d).unwrap()
    }

    #[test]
    fn vacuum_eigs_and_zero_drive() {
        assert_eq!(ptranspose_symplectic_eigs(&GaussianTwoModeState::vacuum()), (1.0, 1.0));
        assert_eq!(negativity(&GaussianTwoModeState::vacuum()), 0.0);
        let pair = WavepacketPair::new(0.1, 0.05, 0.01).unwrap();
        let s = covariance_first_order(&kernel(0.0), &pair).unwrap();
        assert_eq!(*s.sigma(), Matrix4::identity());
    }

    #[test]
    fn overlapping_packets_rejected() {
        assert!(WavepacketPair::new(0.1, 0.095, 0.01).is_err());
        assert!(WavepacketPair::new(0.1, 0.004, 0.01).is_err());
    }

    #[test]
    fn non_symmetric_rejected() {
        let mut m = Matrix4::identity();
        m[(0, 1)] = 1e-6;
        assert!(GaussianTwoModeState::new(m).is_err());
    }

    #[test]
    fn closed_form_eigenvalues() {
        // off-diagonal block only: ν± = |1 ± 2|J||
        for j in [C64::new(0.01, 0.0), C64::new(0.003, -0.02), C64::new(-0.1, 0.05)] {
            let mut sigma = Matrix4::identity();
            let c = block_from(j);
            sigma.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
            sigma.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
            let (lo, hi) = ptranspose_symplectic_eigs(&GaussianTwoModeState::new(sigma).unwrap());
            assert!((lo - (1.0 - 2.0 * j.norm())).abs() < 1e-12, "{lo}");
            assert!((hi - (1.0 + 2.0 * j.norm())).abs() < 1e-12);
        }
    }

    #[test]
    fn off_diagonal_block_norm() {
        let k = kernel(0.25);
        let w = 0.155 / 200.0;
        let pair = WavepacketPair::new(0.1, 0.05, w).unwrap();
        let s = covariance_first_order(&k, &pair).unwrap();
        let norm = s.block_c().norm() / 2f64.sqrt();
        let expect = 2.0 * negativity_closed_form(&k, &pair).unwrap();
        assert!((norm - expect).abs() < 0.05 * expect, "{norm} {expect}");
    }

    #[test]
    fn diagonal_blocks_traceless_at_first_order() {
        let k = kernel(0.25);
        let pair = WavepacketPair::new(0.1, 0.05, 0.155 / 200.0).unwrap();
        let s = covariance_first_order(&k, &pair).unwrap();
        assert!((s.block_a().trace() - 2.0).abs() < 1e-14);
        assert!((s.block_b().trace() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dual_path_residual_is_second_order() {
        let pair = WavepacketPair::new(0.1, 0.055, 0.155 / 200.0).unwrap();
        let residual = |eps: f64| {
            let k = kernel(eps);
            let n = negativity(&covariance_first_order(&k, &pair).unwrap());
            (n - negativity_first_order(&k, &pair).unwrap()).abs()
        };
        let (r1, r2, r3) = (residual(0.2), residual(0.1), residual(0.05));
        assert!((r1 / r2 - 4.0).abs() < 0.6 && (r2 / r3 - 4.0).abs() < 0.6, "{r1} {r2} {r3}");
    }

    struct Rotated<'a>(&'a dyn ContinuumKernel, f64);

    impl ContinuumKernel for Rotated<'_> {
        fn regime(&self) -> crate::continuous::Regime {
            self.0.regime()
        }
        fn a_hat(&self, kp: f64, k: f64) -> Result<C64> {
            self.0.a_hat(kp, k)
        }
        fn b_hat(&self, kp: f64, k: f64) -> Result<C64> {
            self.0.b_hat(kp, k)
        }
        fn phase(&self, kp: f64) -> C64 {
            self.0.phase(kp) * C64::from_polar(1.0, self.1)
        }
        fn duration(&self) -> f64 {
            self.0.duration()
        }
    }

    #[test]
    fn global_phase_invariance() {
        let k = kernel(0.25);
        let pair = WavepacketPair::new(0.09, 0.06, 0.155 / 200.0).unwrap();
        let n0 = negativity(&covariance_first_order(&k, &pair).unwrap());
        let n1 = negativity(&covariance_first_order(&Rotated(&k, 0.7), &pair).unwrap());
        assert!((n0 - n1).abs() < 1e-12);
    }

    #[test]
    fn packet_normalization() {
        let rule = GaussRule::new(PACKET_NODES);
        let w = 0.003;
        let norm = rule.integrate(|_| 1.0 / w, 0.2, 0.2 + w);
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scan_grid_and_linearity() {
        let cfg = ScanConfig {
            points: 9,
            ..ScanConfig::default()
        };
        let g = cfg.grid(0.155);
        assert!((g[0] - 1.0 / 200.0).abs() < 1e-15 && (g[8] - 0.4).abs() < 1e-15);
        let a = negativity_scan(&kernel(0.2), &kernel(0.2), 0.155, &cfg).unwrap();
        let b = negativity_scan(&kernel(0.1), &kernel(0.1), 0.155, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.bhat_robin / y.bhat_robin - 2.0).abs() < 1e-12);
            assert!(x.negativity_robin >= 0.0);
        }
    }
}
