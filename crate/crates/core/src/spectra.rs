//! Photon flux density `n(k̄) = ω_d ∫|B̂(ω_d k̄, k)|² dk`, total photon number and
//! Robin-vs-mirror comparisons.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::continuous::{ContinuumKernel, DiscreteKernel, Regime};
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_points, pairwise_sum, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxConfig {
    /// Number of uniform `k̄` samples on `(0, kbar_max]`.
    pub grid_points: usize,
    pub kbar_max: f64,
    /// Relative change in `N` accepted when the inner cutoff doubles.
    pub convergence_tol: f64,
    /// Initial inner cutoff; `None` uses `max(20 ω_d, 10/Λ)`.
    pub k_max: Option<f64>,
    pub max_doublings: usize,
    pub quad: QuadConfig,
}

impl Default for FluxConfig {
    fn default() -> Self {
        Self {
            grid_points: 400,
            kbar_max: 2.0,
            convergence_tol: 1e-3,
            k_max: None,
            max_doublings: 12,
            quad: QuadConfig::new(0.0, 1e-8),
        }
    }
}

impl FluxConfig {
    pub fn kbar_grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        (1..=n).map(|i| self.kbar_max * i as f64 / n as f64).collect()
    }

    fn initial_cutoff(&self, kernel: &dyn ContinuumKernel, omega_d: f64) -> f64 {
        self.k_max.unwrap_or_else(|| {
            let from_length = kernel.cutoff_length().map_or(0.0, |l| 10.0 / l);
            (20.0 * omega_d).max(from_length)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxSpectrum {
    pub regime: Regime,
    pub omega_d: f64,
    pub kbar: Vec<f64>,
    pub n: Vec<f64>,
    /// Quadrature error estimate for each `n` sample.
    pub inner_error: Vec<f64>,
    /// Trapezoid integral of `n` over `[0, kbar_max]`, with `n(0) = 0`.
    pub total: f64,
    /// Power-law estimate of what lies beyond the final cutoff, not included in `total`.
    pub tail_estimate: f64,
    pub k_max_used: f64,
    pub convergence_ratio: f64,
}

impl FluxSpectrum {
    /// `k̄` of the largest sample.
    pub fn peak(&self) -> (f64, f64) {
        self.kbar
            .iter()
            .zip(&self.n)
            .fold((f64::NAN, f64::NEG_INFINITY), |best, (&k, &n)| if n > best.1 { (k, n) } else { best })
    }
}

/// Inner integration breakpoints: the resonance `ω(k) = ω_d − ω(k')` and its neighbourhood.
fn breakpoints(kernel: &dyn ContinuumKernel, omega_d: f64, k_prime: f64, a: f64, b: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    let width = 2.0 * PI / kernel.duration();
    let w_res = omega_d - kernel.frequency(k_prime);
    let w0 = kernel.frequency(0.0);
    if w_res > w0 {
        let mass2 = w0 * w0;
        let k_res = (w_res * w_res - mass2).sqrt();
        pts.push(k_res);
        for j in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            pts.push(k_res - j * width);
            pts.push(k_res + j * width);
        }
    }
    // A few log-spaced points resolve the small-k rise.
    let mut x = width.min(b) / 64.0;
    while x < b {
        pts.push(x);
        x *= 4.0;
    }
    pts.retain(|&p| p >= a && p <= b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

struct Segment {
    value: f64,
    error: f64,
}

fn inner_segment(kernel: &dyn ContinuumKernel, omega_d: f64, kbar: f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<Segment> {
    let k_prime = omega_d * kbar;
    let pts = breakpoints(kernel, omega_d, k_prime, a, b);
    let f = |k: f64| {
        if k <= 0.0 {
            return 0.0;
        }
        kernel.b_hat(k_prime, k).map_or(f64::NAN, |z| z.norm_sqr())
    };
    let est = integrate_points(f, &pts, cfg)?;
    if !est.value.is_finite() {
        return Err(invalid("kernel", format!("non-finite B̂ near k' = {k_prime}")));
    }
    Ok(Segment {
        value: omega_d * est.value,
        error: omega_d * est.error,
    })
}

fn trapezoid_from_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(x.len());
    let (mut x0, mut y0) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        terms.push(0.5 * (xi - x0) * (yi + y0));
        x0 = xi;
        y0 = yi;
    }
    pairwise_sum(&terms)
}

/// `n(k̄)` with the inner integral doubled in range until its own change is below `cfg.convergence_tol`.
pub fn flux_density(kernel: &dyn ContinuumKernel, omega_d: f64, kbar: f64, cfg: &FluxConfig) -> Result<(f64, f64)> {
    if !(kbar > 0.0) {
        return Err(invalid("kbar", format!("must be positive, got {kbar}")));
    }
    check_omega(omega_d)?;
    let mut cutoff = cfg.initial_cutoff(kernel, omega_d);
    let first = inner_segment(kernel, omega_d, kbar, 0.0, cutoff, &cfg.quad)?;
    let (mut value, mut error) = (first.value, first.error);
    let mut ratio = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        let seg = inner_segment(kernel, omega_d, kbar, cutoff, 2.0 * cutoff, &cfg.quad)?;
        value += seg.value;
        error += seg.error;
        cutoff *= 2.0;
        if seg.value <= cfg.convergence_tol * value {
            return Ok((value, error));
        }
        ratio = seg.value / value;
    }
    Err(Error::Truncation { ratio, cutoff })
}

fn check_omega(omega_d: f64) -> Result<()> {
    if !(omega_d > 0.0 && omega_d.is_finite()) {
        return Err(invalid("omega_d", format!("must be positive, got {omega_d}")));
    }
    Ok(())
}

/// Flux spectrum on the configured `k̄` grid; the inner cutoff doubles until `N` settles.
pub fn flux_spectrum(kernel: &dyn ContinuumKernel, omega_d: f64, cfg: &FluxConfig) -> Result<FluxSpectrum> {
    check_omega(omega_d)?;
    if cfg.grid_points == 0 || !(cfg.kbar_max > 0.0) {
        return Err(invalid("grid", "need at least one point on a positive range"));
    }
    let kbar = cfg.kbar_grid();
    let segment_all = |a: f64, b: f64| -> Result<Vec<Segment>> {
        kbar.par_iter()
            .map(|&kb| inner_segment(kernel, omega_d, kb, a, b, &cfg.quad))
            .collect()
    };
    let mut cutoff = cfg.initial_cutoff(kernel, omega_d);
    let first = segment_all(0.0, cutoff)?;
    let mut n: Vec<f64> = first.iter().map(|s| s.value).collect();
    let mut err: Vec<f64> = first.iter().map(|s| s.error).collect();
    let mut total = trapezoid_from_zero(&kbar, &n);
    let mut last_gain = total;
    for _ in 0..=cfg.max_doublings {
        let seg = segment_all(cutoff, 2.0 * cutoff)?;
        for (i, s) in seg.iter().enumerate() {
            n[i] += s.value;
            err[i] += s.error;
        }
        cutoff *= 2.0;
        let new_total = trapezoid_from_zero(&kbar, &n);
        let gain = new_total - total;
        let ratio = if new_total > 0.0 { gain.abs() / new_total } else { 0.0 };
        let previous_gain = last_gain;
        total = new_total;
        last_gain = gain;
        if ratio < cfg.convergence_tol {
            let r = if previous_gain > 0.0 { gain / previous_gain } else { 0.0 };
            let tail_estimate = if gain > 0.0 && r > 0.0 && r < 1.0 {
                gain * r / (1.0 - r)
            } else {
                0.0
            };
            return Ok(FluxSpectrum {
                regime: kernel.regime(),
                omega_d,
                kbar,
                n,
                inner_error: err,
                total,
                tail_estimate,
                k_max_used: cutoff,
                convergence_ratio: ratio,
            });
        }
    }
    Err(Error::Truncation {
        ratio: last_gain.abs() / total,
        cutoff,
    })
}

/// Robin and mirror spectra on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub robin: FluxSpectrum,
    pub mirror: FluxSpectrum,
    /// `n_robin / n_mirror`; NaN where the mirror density vanishes.
    pub ratio: Vec<f64>,
}

impl SpectrumComparison {
    pub fn new(robin: FluxSpectrum, mirror: FluxSpectrum) -> Result<Self> {
        if robin.kbar != mirror.kbar {
            return Err(invalid("grid", "spectra sampled on different k̄ grids"));
        }
        let ratio = robin
            .n
            .iter()
            .zip(&mirror.n)
            .map(|(&r, &m)| if m > 0.0 { r / m } else { f64::NAN })
            .collect();
        Ok(Self { robin, mirror, ratio })
    }

    pub fn kbar(&self) -> &[f64] {
        &self.robin.kbar
    }

    /// Largest `|n_robin/n_mirror − 1|` over samples with `k̄ ∈ [lo, hi]`.
    pub fn max_relative_deviation(&self, lo: f64, hi: f64) -> f64 {
        self.kbar()
            .iter()
            .zip(&self.ratio)
            .filter(|(&k, _)| k >= lo && k <= hi)
            .map(|(_, &r)| (r - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Mean ratio in each bin `[edges[i], edges[i+1])`.
    pub fn binned_ratio(&self, edges: &[f64]) -> Vec<f64> {
        edges
            .windows(2)
            .map(|w| {
                let vals: Vec<f64> = self
                    .kbar()
                    .iter()
                    .zip(&self.ratio)
                    .filter(|(&k, r)| k >= w[0] && k < w[1] && r.is_finite())
                    .map(|(_, &r)| r)
                    .collect();
                if vals.is_empty() {
                    f64::NAN
                } else {
                    pairwise_sum(&vals) / vals.len() as f64
                }
            })
            .collect()
    }
}

pub fn compare_spectra(
    robin: &dyn ContinuumKernel,
    mirror: &dyn ContinuumKernel,
    omega_d: f64,
    cfg: &FluxConfig,
) -> Result<SpectrumComparison> {
    let r = flux_spectrum(robin, omega_d, cfg)?;
    let m = flux_spectrum(mirror, omega_d, cfg)?;
    SpectrumComparison::new(r, m)
}

/// Created quanta per cavity mode, `n_m = Σ_n |B̂_mn|²` over `n ≤ truncation`.
pub fn cavity_occupations(kernel: &dyn DiscreteKernel, modes: usize, truncation: usize) -> Result<Vec<f64>> {
    if truncation < modes {
        return Err(invalid("truncation", format!("must cover the {modes} requested modes")));
    }
    (1..=modes)
        .into_par_iter()
        .map(|m| {
            let terms = (1..=truncation)
                .map(|n| kernel.b_hat(m, n).map(|z| z.norm_sqr()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(pairwise_sum(&terms))
        })
        .collect()
}
