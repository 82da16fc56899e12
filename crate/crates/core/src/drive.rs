//! Time profiles of boundary modulations and their Fourier-type window integrals.
//!
//! Analytic profiles are stored as piecewise sums of complex exponentials in
//! `s = t - t0`, which makes the window integral
//! `∫ e^{-iΩ(t-t0)} η(t) dt` and all time derivatives exact.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_points, pairwise_sum, Estimate, GaussRule, QuadConfig};

/// One term `coeff · e^{i freq s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coeff: C64,
    pub freq: f64,
}

impl ExpTerm {
    pub fn new(coeff: C64, freq: f64) -> Self {
        Self { coeff, freq }
    }
}

/// Exponential sum valid on `[start, end]`, both measured from the profile origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPiece {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<ExpTerm>,
}

impl ExpPiece {
    fn eval(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.coeff * C64::from_polar(1.0, t.freq * s)).re)
            .sum()
    }

    fn window_integral(&self, omega: f64) -> C64 {
        let h = self.end - self.start;
        let mid = 0.5 * (self.start + self.end);
        let parts: Vec<C64> = self
            .terms
            .iter()
            .map(|t| {
                let x = t.freq - omega;
                t.coeff * C64::from_polar(h * sinc(0.5 * x * h), x * mid)
            })
            .collect();
        pairwise_sum(&parts)
    }
}

/// `sin(x)/x`, evaluated by series near zero so resonant integrals stay exact.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

fn product(a: &[ExpTerm], b: &[ExpTerm]) -> Vec<ExpTerm> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| ExpTerm::new(x.coeff * y.coeff, x.freq + y.freq)))
        .collect()
}

fn sine_terms(amplitude: f64, omega: f64) -> Vec<ExpTerm> {
    // A sin(ωs) = A/(2i) e^{iωs} - A/(2i) e^{-iωs}
    let c = C64::new(0.0, -0.5 * amplitude);
    vec![ExpTerm::new(c, omega), ExpTerm::new(-c, -omega)]
}

/// Descriptive tag kept for manifests and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveKind {
    Zero,
    Sinusoid { epsilon: f64, omega_d: f64 },
    WindowedSinusoid { epsilon: f64, omega_d: f64, ramp: f64 },
    Exponential,
    Sampled { dt: f64 },
    Callback,
}

#[derive(Clone)]
enum Shape {
    Exp(Vec<ExpPiece>),
    Sampled { dt: f64, values: Vec<f64> },
    Callback(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A modulation supported on `[t0, tf]` and zero outside.
#[derive(Clone)]
pub struct DriveProfile {
    t0: f64,
    tf: f64,
    kind: DriveKind,
    shape: Shape,
}

impl fmt::Debug for DriveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriveProfile")
            .field("t0", &self.t0)
            .field("tf", &self.tf)
            .field("kind", &self.kind)
            .finish()
    }
}

fn check_window(t0: f64, tf: f64) -> Result<()> {
    if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
        return Err(invalid("window", format!("need finite t0 < tf, got [{t0}, {tf}]")));
    }
    Ok(())
}

impl DriveProfile {
    pub fn zero(t0: f64, tf: f64) -> Result<Self> {
        check_window(t0, tf)?;
        Ok(Self {
            t0,
            tf,
            kind: DriveKind::Zero,
            shape: Shape::Exp(Vec::new()),
        })
    }

    /// `ε sin(ω_d (t - t0))` on `[t0, tf]`.
    pub fn sinusoid(epsilon: f64, omega_d: f64, t0: f64, tf: f64) -> Result<Self> {
        check_window(t0, tf)?;
        let pieces = vec![ExpPiece {
            start: 0.0,
            end: tf - t0,
            terms: sine_terms(epsilon, omega_d),
        }];
        Ok(Self {
            t0,
            tf,
            kind: DriveKind::Sinusoid { epsilon, omega_d },
            shape: Shape::Exp(pieces),
        })
    }

    /// Sinusoid multiplied by `sin²` ramps of length `ramp` at both ends, so the
    /// profile and its first derivative vanish at `t0` and `tf`.
    pub fn windowed_sinusoid(epsilon: f64, omega_d: f64, t0: f64, tf: f64, ramp: f64) -> Result<Self> {
        check_window(t0, tf)?;
        let total = tf - t0;
        if !(ramp > 0.0 && 2.0 * ramp <= total) {
            return Err(invalid("ramp", format!("need 0 < ramp <= {}, got {ramp}", total / 2.0)));
        }
        let sine = sine_terms(epsilon, omega_d);
        let k = PI / ramp;
        let up = [
            ExpTerm::new(C64::new(0.5, 0.0), 0.0),
            ExpTerm::new(C64::new(-0.25, 0.0), k),
            ExpTerm::new(C64::new(-0.25, 0.0), -k),
        ];
        let phase = C64::from_polar(1.0, k * total);
        let down = [
            ExpTerm::new(C64::new(0.5, 0.0), 0.0),
            ExpTerm::new(-0.25 * phase, -k),
            ExpTerm::new(-0.25 * phase.conj(), k),
        ];
        let mut pieces = vec![ExpPiece {
            start: 0.0,
            end: ramp,
            terms: product(&up, &sine),
        }];
        if total - 2.0 * ramp > 0.0 {
            pieces.push(ExpPiece {
                start: ramp,
                end: total - ramp,
                terms: sine,
            });
        }
        pieces.push(ExpPiece {
            start: total - ramp,
            end: total,
            terms: product(&down, &sine_terms(epsilon, omega_d)),
        });
        Ok(Self {
            t0,
            tf,
            kind: DriveKind::WindowedSinusoid { epsilon, omega_d, ramp },
            shape: Shape::Exp(pieces),
        })
    }

    /// General piecewise exponential sum; piece bounds are relative to `t0`.
    pub fn from_pieces(t0: f64, tf: f64, pieces: Vec<ExpPiece>) -> Result<Self> {
        check_window(t0, tf)?;
        let span = tf - t0;
        let mut last = 0.0;
        for p in &pieces {
            if p.start < last - 1e-12 * span || p.end < p.start || p.end > span * (1.0 + 1e-12) {
                return Err(invalid("pieces", "pieces must be ordered and inside the window"));
            }
            last = p.end;
        }
        Ok(Self {
            t0,
            tf,
            kind: DriveKind::Exponential,
            shape: Shape::Exp(pieces),
        })
    }

    /// Uniform samples `values[j] = η(t0 + j·dt)`; the window ends at the last sample.
    pub fn sampled(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("need a positive step, got {dt}")));
        }
        if values.len() < 5 {
            return Err(invalid("values", "need at least five samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "samples must be finite"));
        }
        let tf = t0 + dt * (values.len() - 1) as f64;
        check_window(t0, tf)?;
        Ok(Self {
            t0,
            tf,
            kind: DriveKind::Sampled { dt },
            shape: Shape::Sampled { dt, values },
        })
    }

    /// Arbitrary closure; window integrals fall back to adaptive quadrature.
    pub fn callback(t0: f64, tf: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_window(t0, tf)?;
        Ok(Self {
            t0,
            tf,
            kind: DriveKind::Callback,
            shape: Shape::Callback(Arc::new(f)),
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn duration(&self) -> f64 {
        self.tf - self.t0
    }

    pub fn kind(&self) -> DriveKind {
        self.kind
    }

    /// Sampling step for sampled profiles.
    pub fn sample_step(&self) -> Option<f64> {
        match &self.shape {
            Shape::Sampled { dt, .. } => Some(*dt),
            _ => None,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.shape {
            Shape::Exp(p) => p.iter().all(|p| p.terms.iter().all(|t| t.coeff == C64::new(0.0, 0.0))),
            Shape::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
            Shape::Callback(_) => false,
        }
    }

    /// Value at time `t`; zero outside the window.
    pub fn eval(&self, t: f64) -> f64 {
        if t < self.t0 || t > self.tf {
            return 0.0;
        }
        let s = t - self.t0;
        match &self.shape {
            Shape::Exp(pieces) => pieces
                .iter()
                .rev()
                .find(|p| p.start <= s)
                .filter(|p| s <= p.end)
                .map_or(0.0, |p| p.eval(s)),
            Shape::Sampled { dt, values } => {
                let (j, u) = locate(s, *dt, values.len());
                let c = cubic_weights(j, u, values.len());
                c.iter().map(|(i, w)| w * values[*i]).sum()
            }
            Shape::Callback(f) => f(t),
        }
    }

    /// Multiply the profile by a constant.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            Shape::Exp(pieces) => Shape::Exp(
                pieces
                    .iter()
                    .map(|p| ExpPiece {
                        start: p.start,
                        end: p.end,
                        terms: p
                            .terms
                            .iter()
                            .map(|t| ExpTerm::new(t.coeff * factor, t.freq))
                            .collect(),
                    })
                    .collect(),
            ),
            Shape::Sampled { dt, values } => Shape::Sampled {
                dt: *dt,
                values: values.iter().map(|v| v * factor).collect(),
            },
            Shape::Callback(f) => {
                let f = Arc::clone(f);
                Shape::Callback(Arc::new(move |t| factor * f(t)))
            }
        };
        let kind = match self.kind {
            DriveKind::Sinusoid { epsilon, omega_d } => DriveKind::Sinusoid {
                epsilon: epsilon * factor,
                omega_d,
            },
            DriveKind::WindowedSinusoid { epsilon, omega_d, ramp } => DriveKind::WindowedSinusoid {
                epsilon: epsilon * factor,
                omega_d,
                ramp,
            },
            k => k,
        };
        Self {
            t0: self.t0,
            tf: self.tf,
            kind,
            shape,
        }
    }

    /// Time derivative inside the window (the jump terms at the ends are not included).
    pub fn derivative(&self) -> Result<Self> {
        let shape = match &self.shape {
            Shape::Exp(pieces) => Shape::Exp(
                pieces
                    .iter()
                    .map(|p| ExpPiece {
                        start: p.start,
                        end: p.end,
                        terms: p
                            .terms
                            .iter()
                            .map(|t| ExpTerm::new(t.coeff * C64::new(0.0, t.freq), t.freq))
                            .filter(|t| t.coeff != C64::new(0.0, 0.0))
                            .collect(),
                    })
                    .collect(),
            ),
            Shape::Sampled { dt, values } => Shape::Sampled {
                dt: *dt,
                values: finite_difference(values, *dt),
            },
            Shape::Callback(_) => {
                return Err(Error::Unsupported(
                    "derivatives of callback profiles; sample them first".into(),
                ))
            }
        };
        let kind = match self.kind {
            DriveKind::Sampled { dt } => DriveKind::Sampled { dt },
            _ => DriveKind::Exponential,
        };
        Ok(Self {
            t0: self.t0,
            tf: self.tf,
            kind,
            shape,
        })
    }

    /// Values just inside the window at `t0` and `tf`.
    pub fn endpoint_values(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Exp(pieces) => {
                let first = pieces.first().map_or(0.0, |p| if p.start == 0.0 { p.eval(0.0) } else { 0.0 });
                let span = self.duration();
                let last = pieces
                    .last()
                    .map_or(0.0, |p| if (p.end - span).abs() <= 1e-12 * span { p.eval(span) } else { 0.0 });
                (first, last)
            }
            Shape::Sampled { values, .. } => (values[0], values[values.len() - 1]),
            Shape::Callback(f) => (f(self.t0), f(self.tf)),
        }
    }

    /// `∫_{t0}^{tf} e^{-iΩ(t - t0)} η(t) dt`.
    pub fn window_integral(&self, omega: f64) -> Result<C64> {
        Ok(self.window_integral_estimate(omega)?.value)
    }

    /// Window integral with an error estimate (zero for exponential sums, which are exact).
    pub fn window_integral_estimate(&self, omega: f64) -> Result<Estimate<C64>> {
        match &self.shape {
            Shape::Exp(pieces) => {
                let parts: Vec<C64> = pieces.iter().map(|p| p.window_integral(omega)).collect();
                Ok(Estimate {
                    value: pairwise_sum(&parts),
                    error: 0.0,
                    evaluations: 0,
                })
            }
            Shape::Sampled { dt, values } => {
                let fine = sampled_integral(values, *dt, omega);
                let error = if values.len() >= 9 {
                    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
                    if (values.len() - 1) % 2 == 0 {
                        (fine - sampled_integral(&coarse, 2.0 * dt, omega)).norm() / 15.0
                    } else {
                        f64::NAN
                    }
                } else {
                    f64::NAN
                };
                Ok(Estimate {
                    value: fine,
                    error,
                    evaluations: values.len(),
                })
            }
            Shape::Callback(f) => {
                let span = self.duration();
                let cycles = (omega.abs() * span / PI).ceil().clamp(1.0, 2000.0) as usize;
                let points: Vec<f64> = (0..=cycles).map(|j| span * j as f64 / cycles as f64).collect();
                let t0 = self.t0;
                let cfg = QuadConfig {
                    abs_tol: 1e-15 * span,
                    rel_tol: 1e-12,
                    max_segments: 20 * cycles + 2000,
                };
                integrate_points(|s: f64| C64::from_polar(f(t0 + s), -omega * s), &points, &cfg)
            }
        }
    }

    /// `n` equally spaced samples of the profile across its window.
    pub fn sample_grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n)
            .map(|j| self.eval(self.t0 + self.duration() * j as f64 / (n - 1) as f64))
            .collect()
    }
}

fn locate(s: f64, dt: f64, len: usize) -> (usize, f64) {
    let x = (s / dt).max(0.0);
    let j = (x.floor() as usize).min(len - 2);
    (j, x - j as f64)
}

/// Four-point Lagrange weights for the interval `[j, j+1]` at fractional position `u`.
fn cubic_weights(j: usize, u: f64, len: usize) -> [(usize, f64); 4] {
    let base = j.saturating_sub(1).min(len - 4);
    let x = (j - base) as f64 + u;
    let mut out = [(0, 0.0); 4];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut w = 1.0;
        for b in 0..4 {
            if b != a {
                w *= (x - b as f64) / (a as f64 - b as f64);
            }
        }
        *slot = (base + a, w);
    }
    out
}

fn sampled_integral(values: &[f64], dt: f64, omega: f64) -> C64 {
    let rule = GaussRule::new(8);
    let nodes: Vec<(f64, f64)> = rule.mapped(0.0, 1.0).collect();
    let parts: Vec<C64> = (0..values.len() - 1)
        .map(|j| {
            let terms: Vec<C64> = nodes
                .iter()
                .map(|&(u, w)| {
                    let eta: f64 = cubic_weights(j, u, values.len())
                        .iter()
                        .map(|(i, c)| c * values[*i])
                        .sum();
                    C64::from_polar(w * eta, -omega * (j as f64 + u) * dt)
                })
                .collect();
            pairwise_sum(&terms) * dt
        })
        .collect();
    pairwise_sum(&parts)
}

fn finite_difference(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * dt)
            } else if i < 2 {
                (-25.0 * values[i] + 48.0 * values[i + 1] - 36.0 * values[i + 2] + 16.0 * values[i + 3]
                    - 3.0 * values[i + 4])
                    / (12.0 * dt)
            } else {
                (25.0 * values[i] - 48.0 * values[i - 1] + 36.0 * values[i - 2] - 16.0 * values[i - 3]
                    + 3.0 * values[i - 4])
                    / (12.0 * dt)
            }
        })
        .collect()
}
