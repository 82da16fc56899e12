//! Adaptive Gauss-Kronrod quadrature, Gauss-Legendre rules and principal values.
//!
//! Everything here is deterministic: segment selection breaks ties by
//! insertion order and final sums use pairwise reduction.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_segments: 4000,
        }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Loosen (factor > 1) or tighten (factor < 1) both tolerances.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: (self.rel_tol * factor).min(0.1),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv = [(T::zero(), T::zero()); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kron = kron + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *slot = (f1, f2);
    }
    let mean = kron * 0.5;
    let mut asc = (fc - mean).magnitude() * WGK[7];
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    asc *= half.abs();
    let value = kron * half;
    let mut error = ((kron - gauss) * half).magnitude();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Segment { a, b, value, error }
}

/// Sum with pairwise reduction so the result does not depend on thread layout.
pub fn pairwise_sum<T: QuadValue>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        n if n <= 8 => values[1..].iter().fold(values[0], |acc, &v| acc + v),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Global adaptive G7K15 over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_points(f, &[a, b], cfg)
}

/// Adaptive quadrature with the initial partition given by sorted `points`.
pub fn integrate_points<T, F>(f: F, points: &[f64], cfg: &QuadConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut segs: Vec<Segment<T>> = points
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();
    if segs.is_empty() {
        return Ok(Estimate {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut evaluations = 15 * segs.len();
    loop {
        let total = pairwise_sum(&segs.iter().map(|s| s.value).collect::<Vec<_>>());
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if error <= target {
            return Ok(Estimate {
                value: total,
                error,
                evaluations,
            });
        }
        // worst segment; first one wins ties
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let s = &segs[worst];
        let mid = 0.5 * (s.a + s.b);
        let too_small = (s.b - s.a).abs() <= 1e3 * f64::EPSILON * (s.a.abs() + s.b.abs()).max(1e-300);
        if segs.len() >= cfg.max_segments || too_small || mid == s.a || mid == s.b {
            return Err(Error::Quadrature {
                achieved: error,
                requested: target,
            });
        }
        let (a, b) = (s.a, s.b);
        segs[worst] = kronrod(&f, a, mid);
        segs.insert(worst + 1, kronrod(&f, mid, b));
        evaluations += 30;
    }
}

/// Integral over `[a, ∞)` via the map `x = a + (1 - t)/t`.
pub fn integrate_to_infinity<T, F>(f: F, a: f64, cfg: &QuadConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let g = |t: f64| {
        if t <= 0.0 {
            return T::zero();
        }
        let x = a + (1.0 - t) / t;
        f(x) * (1.0 / (t * t))
    };
    integrate(g, 0.0, 1.0, cfg)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights scaled to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> T {
        let terms: Vec<T> = self.mapped(a, b).map(|(x, w)| f(x) * w).collect();
        pairwise_sum(&terms)
    }
}

/// Principal value of `∫_a^b f(x)/(x - pole) dx` with `a < pole < b`.
///
/// A symmetric window of half-width `half_width` (clipped to the interval)
/// is folded onto itself so the integrand there is `(f(p+s) - f(p-s))/s`,
/// which is smooth; the rest is integrated directly.
pub fn principal_value<T, F>(
    f: F,
    pole: f64,
    a: f64,
    b: f64,
    half_width: f64,
    cfg: &QuadConfig,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(a < pole && pole < b) {
        return Err(crate::error::invalid(
            "pole",
            format!("{pole} must lie strictly inside ({a}, {b})"),
        ));
    }
    let h = half_width.min(pole - a).min(b - pole);
    let window = integrate(|s: f64| (f(pole + s) - f(pole - s)) * (1.0 / s), 0.0, h, cfg)?;
    let mut value = window.value;
    let mut error = window.error;
    let mut evaluations = window.evaluations;
    for (lo, hi) in [(a, pole - h), (pole + h, b)] {
        if hi > lo {
            let part = integrate(|x: f64| f(x) * (1.0 / (x - pole)), lo, hi, cfg)?;
            value = value + part.value;
            error += part.error;
            evaluations += part.evaluations;
        }
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}
