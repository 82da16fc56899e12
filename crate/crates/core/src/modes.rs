//! Static-boundary modes: Robin phase shifts, semiopen and cavity mode
//! functions, the Klein-Gordon inner product and the cavity eigenvalue solver.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_points, Estimate, QuadConfig};
use crate::roots::brent;

/// Robin parameter `D` in `φ + D ∂_x φ = 0`; `Neumann` is the infinite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobinParameter {
    Finite(f64),
    Neumann,
}

impl RobinParameter {
    pub const DIRICHLET: Self = RobinParameter::Finite(0.0);

    /// `1/D`, with `0` for Neumann. Infinite for Dirichlet.
    pub fn inverse(self) -> f64 {
        match self {
            RobinParameter::Finite(d) => 1.0 / d,
            RobinParameter::Neumann => 0.0,
        }
    }

    /// Whether `-∂_x² + μ²` stays positive on the half-line.
    ///
    /// For `μ > 0` the range `0 < D ≤ 1/μ` is excluded: there the ground
    /// mode frequency is imaginary or zero.
    pub fn is_admissible(self, mu: f64) -> bool {
        match self {
            RobinParameter::Neumann => true,
            RobinParameter::Finite(d) if d <= 0.0 => true,
            RobinParameter::Finite(d) => mu > 0.0 && d * mu > 1.0,
        }
    }
}

impl fmt::Display for RobinParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobinParameter::Finite(d) => write!(f, "{d}"),
            RobinParameter::Neumann => write!(f, "inf"),
        }
    }
}

/// Phase shift with `tan δ = -kD`, principal branch; `π/2` for Neumann.
pub fn robin_phase_shift(k: f64, d: RobinParameter) -> f64 {
    match d {
        RobinParameter::Finite(d) => (-k * d).atan(),
        RobinParameter::Neumann => FRAC_PI_2,
    }
}

/// Time-dependent mode function with an analytic time derivative.
pub trait ModeFunction {
    fn value(&self, t: f64, x: f64) -> C64;
    fn time_derivative(&self, t: f64, x: f64) -> C64;
}

/// Continuum mode `e^{-iω t} sin(kx + δ)/√(πω)` on the half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiopenMode {
    pub k: f64,
    pub mu: f64,
    pub omega: f64,
    pub delta: f64,
}

impl SemiopenMode {
    pub fn new(k: f64, mu: f64, d: RobinParameter) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid("k", format!("wavenumber must be positive, got {k}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("mass must be non-negative, got {mu}")));
        }
        Ok(Self {
            k,
            mu,
            omega: k.hypot(mu),
            delta: robin_phase_shift(k, d),
        })
    }
}

/// Mode value with the time origin moved to `shift_origin`.
pub fn semiopen_mode_eval(mode: &SemiopenMode, shift_origin: f64, t: f64, x: f64) -> C64 {
    let amp = (mode.k * x + mode.delta).sin() / (PI * mode.omega).sqrt();
    C64::from_polar(amp, -mode.omega * (t - shift_origin))
}

impl ModeFunction for SemiopenMode {
    fn value(&self, t: f64, x: f64) -> C64 {
        semiopen_mode_eval(self, 0.0, t, x)
    }
    fn time_derivative(&self, t: f64, x: f64) -> C64 {
        C64::new(0.0, -self.omega) * self.value(t, x)
    }
}

/// Bound state `e^{-x/D}` that exists for `1/μ < D < ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundMode {
    pub d: f64,
    pub mu: f64,
    pub frequency: f64,
}

/// The discrete ground mode, if the boundary supports one.
pub fn ground_mode(mu: f64, d: RobinParameter) -> Option<GroundMode> {
    match d {
        RobinParameter::Finite(d) if mu > 0.0 && d * mu > 1.0 && d.is_finite() => Some(GroundMode {
            d,
            mu,
            frequency: (mu * mu - 1.0 / (d * d)).sqrt(),
        }),
        _ => None,
    }
}

impl ModeFunction for GroundMode {
    fn value(&self, t: f64, x: f64) -> C64 {
        let norm = ((self.mu * self.d).powi(2) - 1.0).powf(0.25);
        C64::from_polar((-x / self.d).exp() / norm, -self.frequency * t)
    }
    fn time_derivative(&self, t: f64, x: f64) -> C64 {
        C64::new(0.0, -self.frequency) * self.value(t, x)
    }
}

/// `−i ∫ (f ∂_t ḡ − ∂_t f ḡ) dx` over `domain` at time `t`.
pub fn kg_inner_product(
    f: &dyn ModeFunction,
    g: &dyn ModeFunction,
    domain: (f64, f64),
    t: f64,
    cfg: &QuadConfig,
) -> Result<Estimate<C64>> {
    let (a, b) = domain;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(invalid("domain", format!("need a finite interval, got [{a}, {b}]")));
    }
    let n = 32;
    let points: Vec<f64> = (0..=n).map(|j| a + (b - a) * j as f64 / n as f64).collect();
    let est = integrate_points(
        |x: f64| {
            f.value(t, x) * g.time_derivative(t, x).conj() - f.time_derivative(t, x) * g.value(t, x).conj()
        },
        &points,
        cfg,
    )?;
    Ok(Estimate {
        value: est.value * C64::new(0.0, -1.0),
        ..est
    })
}

/// Dirichlet cavity mode `e^{-inπt/L} sin(nπx/L)/√(πn)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletCavityMode {
    pub n: u32,
    pub length: f64,
}

impl ModeFunction for DirichletCavityMode {
    fn value(&self, t: f64, x: f64) -> C64 {
        let q = PI * self.n as f64;
        C64::from_polar((q * x / self.length).sin() / q.sqrt(), -q * t / self.length)
    }
    fn time_derivative(&self, t: f64, x: f64) -> C64 {
        C64::new(0.0, -PI * self.n as f64 / self.length) * self.value(t, x)
    }
}

/// `g(q) = (κ₁+κ₂) q cos q − (κ₁κ₂q² − 1) sin q`, scaled so its slope at a root is of order one.
pub fn cavity_equation(kappa1: f64, kappa2: f64, q: f64) -> f64 {
    let a = (kappa1 + kappa2) * q;
    let b = kappa1 * kappa2 * q * q - 1.0;
    (a * q.cos() - b * q.sin()) / a.hypot(b)
}

/// `F(q) = (1+κ₁+κ₁²q²)(1+κ₂+κ₂²q²) − κ₁κ₂`.
pub fn cavity_norm_factor(kappa1: f64, kappa2: f64, q: f64) -> f64 {
    let q2 = q * q;
    (1.0 + kappa1 + kappa1 * kappa1 * q2) * (1.0 + kappa2 + kappa2 * kappa2 * q2) - kappa1 * kappa2
}

/// Ordered roots of the cavity eigenvalue equation, one per `(mπ, (m+1)π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityModeTable {
    pub kappa1: f64,
    pub kappa2: f64,
    pub length: f64,
    roots: Vec<f64>,
}

const BRACKET_INSET: f64 = 1e-9 * PI;
const ROOT_TOL: f64 = 1e-13;

/// First `m_max` cavity eigenvalues for a cavity of unit length.
pub fn cavity_eigenvalues(kappa1: f64, kappa2: f64, m_max: usize) -> Result<CavityModeTable> {
    for (name, k) in [("kappa1", kappa1), ("kappa2", kappa2)] {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid(name, format!("must be positive, got {k}")));
        }
    }
    if m_max == 0 {
        return Err(invalid("m_max", "need at least one root"));
    }
    let g = |q: f64| cavity_equation(kappa1, kappa2, q);
    let roots = (0..m_max)
        .map(|m| {
            let lo = m as f64 * PI;
            let hi = lo + PI;
            let (mut a, mut b) = (lo + BRACKET_INSET, hi - BRACKET_INSET);
            if g(a).signum() == g(b).signum() {
                // root squeezed against an endpoint; the poles of cot are harmless in g
                a = if m == 0 { f64::MIN_POSITIVE } else { lo };
                b = hi;
            }
            if g(a).signum() == g(b).signum() {
                return Err(Error::Bracket { index: m });
            }
            brent(g, a, b, ROOT_TOL, 200)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CavityModeTable {
        kappa1,
        kappa2,
        length: 1.0,
        roots,
    })
}

impl CavityModeTable {
    pub fn with_length(mut self, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", format!("must be positive, got {length}")));
        }
        self.length = length;
        Ok(self)
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Index of `q` in the table; `q` must match a stored root to ~1e-12.
    pub fn index_of(&self, q: f64) -> Result<usize> {
        self.roots
            .iter()
            .position(|r| (r - q).abs() <= 1e-12 * r.max(1.0))
            .ok_or(Error::UnknownRoot { value: q })
    }

    /// Consecutive integer label; the lowest root has label 1, so labels
    /// coincide with the Dirichlet mode numbers as the κ's go to zero.
    pub fn parity_index(&self, q: f64) -> Result<i64> {
        Ok(self.index_of(q)? as i64 + 1)
    }

    pub fn norm_factor(&self, q: f64) -> f64 {
        cavity_norm_factor(self.kappa1, self.kappa2, q)
    }

    /// `δ_q = arctan(κ₁ q)`.
    pub fn phase(&self, q: f64) -> f64 {
        (self.kappa1 * q).atan()
    }

    pub fn residual(&self, q: f64) -> f64 {
        cavity_equation(self.kappa1, self.kappa2, q).abs()
    }

    pub fn mode(&self, q: f64) -> Result<CavityMode> {
        let i = self.index_of(q)?;
        Ok(self.mode_at(i))
    }

    pub fn mode_at(&self, index: usize) -> CavityMode {
        let q = self.roots[index];
        let (k1, k2) = (self.kappa1, self.kappa2);
        let amp = ((1.0 + k1 * k1 * q * q) * (1.0 + k2 * k2 * q * q) / (q * self.norm_factor(q))).sqrt();
        CavityMode {
            q,
            length: self.length,
            amplitude: amp,
            delta: self.phase(q),
        }
    }

    /// Columnar text form: parameter comments, a header, then `q, δ_q, F(q), φ_q` rows.
    pub fn write_table<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# kappa1 = {:?}", self.kappa1)?;
        writeln!(w, "# kappa2 = {:?}", self.kappa2)?;
        writeln!(w, "# length_mm = {:?}", self.length)?;
        writeln!(w, "q,delta_q,F_q,parity_index")?;
        for (i, &q) in self.roots.iter().enumerate() {
            writeln!(w, "{:?},{:?},{:?},{}", q, self.phase(q), self.norm_factor(q), i + 1)?;
        }
        Ok(())
    }

    pub fn read_table<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: String| invalid("table", msg);
        let (mut k1, mut k2, mut len) = (None, None, None);
        let mut roots = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| bad(format!("line {}: malformed comment", n + 1)))?;
                let v: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("line {}: bad number", n + 1)))?;
                match key.trim() {
                    "kappa1" => k1 = Some(v),
                    "kappa2" => k2 = Some(v),
                    "length_mm" => len = Some(v),
                    other => return Err(bad(format!("line {}: unknown key {other}", n + 1))),
                }
            } else if line.is_empty() || line.starts_with("q,") {
                continue;
            } else {
                let q = line
                    .split(',')
                    .next()
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| bad(format!("line {}: bad row", n + 1)))?;
                roots.push(q);
            }
        }
        let (kappa1, kappa2, length) = match (k1, k2, len) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(bad("missing kappa1, kappa2 or length_mm".into())),
        };
        let table = CavityModeTable {
            kappa1,
            kappa2,
            length,
            roots,
        };
        if let Some(q) = table.roots.iter().find(|&&q| table.residual(q) > 1e-12) {
            return Err(bad(format!("stored value {q} is not a root")));
        }
        Ok(table)
    }
}

/// Normalized cavity mode for one root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    pub q: f64,
    pub length: f64,
    pub amplitude: f64,
    pub delta: f64,
}

impl CavityMode {
    pub fn frequency(&self) -> f64 {
        self.q / self.length
    }
}

impl ModeFunction for CavityMode {
    fn value(&self, t: f64, x: f64) -> C64 {
        C64::from_polar(
            self.amplitude * (self.q * x / self.length + self.delta).sin(),
            -self.frequency() * t,
        )
    }
    fn time_derivative(&self, t: f64, x: f64) -> C64 {
        C64::new(0.0, -self.frequency()) * self.value(t, x)
    }
}

/// Evaluate the mode of `table` with root `q` at `(t, x)`.
pub fn cavity_mode_eval(table: &CavityModeTable, q: f64, t: f64, x: f64) -> Result<C64> {
    if !(0.0..=table.length).contains(&x) {
        return Err(invalid("x", format!("{x} outside [0, {}]", table.length)));
    }
    Ok(table.mode(q)?.value(t, x))
}
