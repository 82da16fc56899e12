//! WebAssembly bindings for the browser demo: flux comparison, negativity
//! scan and cavity eigenvalues.
//!
//! Each operation has a plain Rust entry point returning `robin_dce::Result`
//! and a thin exported wrapper that turns errors into JavaScript exceptions.

use robin_dce::continuous::SemiopenFarKernel;
use robin_dce::drive::DriveProfile;
use robin_dce::entanglement::{negativity_scan, ScanConfig};
use robin_dce::mirror::{AccelerationProfile, MovingMirrorKernel};
use robin_dce::modes::cavity_eigenvalues;
use robin_dce::spectra::{compare_spectra, FluxConfig};
use wasm_bindgen::prelude::*;

/// Half-line drive shared by the flux and negativity demos: `D = −Λ(1 + η(t))`
/// with `η = ε sin(ω_d t)` on `[0, T]`, optionally ramped in and out.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineDrive {
    pub robin_length: f64,
    pub epsilon: f64,
    pub omega_d: f64,
    pub duration: f64,
    /// Ramp time at each end; `0` keeps the plain sinusoid.
    pub ramp: f64,
}

#[wasm_bindgen]
impl HalfLineDrive {
    #[wasm_bindgen(constructor)]
    pub fn new(robin_length: f64, epsilon: f64, omega_d: f64, duration: f64, ramp: f64) -> Self {
        Self {
            robin_length,
            epsilon,
            omega_d,
            duration,
            ramp,
        }
    }
}

impl HalfLineDrive {
    fn kernels(&self) -> robin_dce::Result<(SemiopenFarKernel, MovingMirrorKernel)> {
        let eta = if self.ramp > 0.0 {
            DriveProfile::windowed_sinusoid(self.epsilon, self.omega_d, 0.0, self.duration, self.ramp)?
        } else {
            DriveProfile::sinusoid(self.epsilon, self.omega_d, 0.0, self.duration)?
        };
        let mirror = MovingMirrorKernel {
            accel: AccelerationProfile::matching_semiopen_far(&eta, self.robin_length)?,
        };
        Ok((SemiopenFarKernel::new(self.robin_length, 0.0, eta)?, mirror))
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct FluxComparison {
    kbar: Vec<f64>,
    robin: Vec<f64>,
    mirror: Vec<f64>,
    total_robin: f64,
    total_mirror: f64,
}

#[wasm_bindgen]
impl FluxComparison {
    #[wasm_bindgen(getter)]
    pub fn kbar(&self) -> Vec<f64> {
        self.kbar.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn robin(&self) -> Vec<f64> {
        self.robin.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mirror(&self) -> Vec<f64> {
        self.mirror.clone()
    }
    #[wasm_bindgen(getter, js_name = totalRobin)]
    pub fn total_robin(&self) -> f64 {
        self.total_robin
    }
    #[wasm_bindgen(getter, js_name = totalMirror)]
    pub fn total_mirror(&self) -> f64 {
        self.total_mirror
    }
}

/// Robin and matched-mirror photon flux densities on `grid_points` samples of `(0, kbar_max]`.
pub fn flux_compare(drive: &HalfLineDrive, grid_points: usize, kbar_max: f64) -> robin_dce::Result<FluxComparison> {
    let (robin, mirror) = drive.kernels()?;
    let cfg = FluxConfig {
        grid_points,
        kbar_max,
        ..FluxConfig::default()
    };
    let c = compare_spectra(&robin, &mirror, drive.omega_d, &cfg)?;
    Ok(FluxComparison {
        kbar: c.kbar().to_vec(),
        total_robin: c.robin.total,
        total_mirror: c.mirror.total,
        robin: c.robin.n,
        mirror: c.mirror.n,
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityScan {
    ratio: Vec<f64>,
    bhat_robin: Vec<f64>,
    bhat_mirror: Vec<f64>,
    negativity_robin: Vec<f64>,
    negativity_mirror: Vec<f64>,
}

#[wasm_bindgen]
impl NegativityScan {
    #[wasm_bindgen(getter)]
    pub fn ratio(&self) -> Vec<f64> {
        self.ratio.clone()
    }
    #[wasm_bindgen(getter, js_name = bhatRobin)]
    pub fn bhat_robin(&self) -> Vec<f64> {
        self.bhat_robin.clone()
    }
    #[wasm_bindgen(getter, js_name = bhatMirror)]
    pub fn bhat_mirror(&self) -> Vec<f64> {
        self.bhat_mirror.clone()
    }
    #[wasm_bindgen(getter, js_name = negativityRobin)]
    pub fn negativity_robin(&self) -> Vec<f64> {
        self.negativity_robin.clone()
    }
    #[wasm_bindgen(getter, js_name = negativityMirror)]
    pub fn negativity_mirror(&self) -> Vec<f64> {
        self.negativity_mirror.clone()
    }
}

/// `|B̂|` and negativity for packets at `ω_d/2 ± Δω`, `Δω/ω_d` up to `max_ratio`.
pub fn negativity_compare(drive: &HalfLineDrive, points: usize, max_ratio: f64) -> robin_dce::Result<NegativityScan> {
    let (robin, mirror) = drive.kernels()?;
    let cfg = ScanConfig {
        points,
        max_ratio,
        ..ScanConfig::default()
    };
    let rows = negativity_scan(&robin, &mirror, drive.omega_d, &cfg)?;
    Ok(NegativityScan {
        ratio: rows.iter().map(|r| r.ratio).collect(),
        bhat_robin: rows.iter().map(|r| r.bhat_robin).collect(),
        bhat_mirror: rows.iter().map(|r| r.bhat_mirror).collect(),
        negativity_robin: rows.iter().map(|r| r.negativity_robin).collect(),
        negativity_mirror: rows.iter().map(|r| r.negativity_mirror).collect(),
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct CavityModes {
    roots: Vec<f64>,
    frequencies: Vec<f64>,
    residuals: Vec<f64>,
}

#[wasm_bindgen]
impl CavityModes {
    /// Dimensionless roots `q`, one per `(mπ, (m+1)π)`.
    #[wasm_bindgen(getter)]
    pub fn roots(&self) -> Vec<f64> {
        self.roots.clone()
    }
    /// `q/L` in mm⁻¹.
    #[wasm_bindgen(getter)]
    pub fn frequencies(&self) -> Vec<f64> {
        self.frequencies.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn residuals(&self) -> Vec<f64> {
        self.residuals.clone()
    }
}

pub fn cavity_modes(kappa1: f64, kappa2: f64, modes: usize, length: f64) -> robin_dce::Result<CavityModes> {
    let table = cavity_eigenvalues(kappa1, kappa2, modes)?.with_length(length)?;
    let roots = table.roots().to_vec();
    Ok(CavityModes {
        frequencies: roots.iter().map(|q| q / length).collect(),
        residuals: roots.iter().map(|&q| table.residual(q)).collect(),
        roots,
    })
}

fn js(e: robin_dce::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = fluxCompare)]
pub fn flux_compare_js(drive: &HalfLineDrive, grid_points: usize, kbar_max: f64) -> Result<FluxComparison, JsError> {
    flux_compare(drive, grid_points, kbar_max).map_err(js)
}

#[wasm_bindgen(js_name = negativityScan)]
pub fn negativity_scan_js(drive: &HalfLineDrive, points: usize, max_ratio: f64) -> Result<NegativityScan, JsError> {
    negativity_compare(drive, points, max_ratio).map_err(js)
}

#[wasm_bindgen(js_name = cavityEigenvalues)]
pub fn cavity_eigenvalues_js(kappa1: f64, kappa2: f64, modes: usize, length: f64) -> Result<CavityModes, JsError> {
    cavity_modes(kappa1, kappa2, modes, length).map_err(js)
}
