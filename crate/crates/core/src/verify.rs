//! Checks of the perturbative Bogoliubov identities on kernels and matrices.
//!
//! Order one: `α₁ + α₁† = 0`, `β₁ = β₁ᵀ`. Order two (real case), off the diagonal:
//! `(α₁ ± β₁)² = α₂ + α₂ᵀ ± (β₂ − β₂ᵀ)`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::continuous::{ContinuumKernel, DiscreteKernel};
use crate::error::{invalid, Result};
use crate::quad::{integrate, integrate_to_infinity, pairwise_sum, principal_value, QuadConfig};
use crate::sudden::{CavityNearDirichlet, SemiopenPerturbative};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Linear,
    QuadraticOffDiagonal,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Linear => "linear",
            Check::QuadraticOffDiagonal => "quadratic_offdiag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// The truncation tail is too uncertain to decide.
    Inconclusive,
    NotApplicable,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
            Outcome::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub regime: String,
    pub check: Check,
    pub max_violation: f64,
    pub tolerance: f64,
    /// Largest truncation-tail correction applied, when a tail was estimated.
    pub tail: Option<f64>,
    /// Matrix size or number of grid points.
    pub truncation: usize,
    /// Entries left out (distributional diagonals).
    pub skipped: usize,
    pub outcome: Outcome,
}

impl IdentityReport {
    fn decide(regime: &str, check: Check, violation: f64, tolerance: f64, truncation: usize, skipped: usize) -> Self {
        let outcome = if violation < tolerance { Outcome::Pass } else { Outcome::Fail };
        Self {
            regime: regime.to_string(),
            check,
            max_violation: violation,
            tolerance,
            tail: None,
            truncation,
            skipped,
            outcome,
        }
    }

    pub fn not_applicable(regime: &str, check: Check) -> Self {
        Self {
            regime: regime.to_string(),
            check,
            max_violation: f64::NAN,
            tolerance: f64::NAN,
            tail: None,
            truncation: 0,
            skipped: 0,
            outcome: Outcome::NotApplicable,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub const CSV_HEADER: &'static str = "regime,check,max_violation,tolerance,tail,truncation,skipped,outcome";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{:?},{},{},{},{}",
            self.regime,
            self.check.name(),
            self.max_violation,
            self.tolerance,
            self.tail.map_or(String::new(), |t| format!("{t:?}")),
            self.truncation,
            self.skipped,
            self.outcome.name()
        )
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {:<18} {:<14} max violation {:.3e} (tol {:.1e}, N = {})",
            self.regime,
            self.check.name(),
            self.outcome.name(),
            self.max_violation,
            self.tolerance,
            self.truncation
        )
    }
}

/// Order-one check on truncated matrices `α₁`, `β₁`.
pub fn check_linear_matrix(regime: &str, alpha1: &DMatrix<C64>, beta1: &DMatrix<C64>, tolerance: f64) -> Result<IdentityReport> {
    if !alpha1.is_square() || alpha1.shape() != beta1.shape() {
        return Err(invalid("matrix", "α₁ and β₁ must be square and of equal size"));
    }
    let a = (alpha1 + alpha1.adjoint()).camax();
    let b = (beta1 - beta1.transpose()).camax();
    Ok(IdentityReport::decide(regime, Check::Linear, a.max(b), tolerance, alpha1.nrows(), 0))
}

/// Order-one check on the first `size` modes of a discrete kernel.
pub fn check_linear_discrete(kernel: &dyn DiscreteKernel, size: usize, tolerance: f64) -> Result<IdentityReport> {
    let a = kernel_matrix(size, |m, n| kernel.a_hat(m, n))?;
    let b = kernel_matrix(size, |m, n| kernel.b_hat(m, n))?;
    check_linear_matrix(kernel.regime().name(), &a, &b, tolerance)
}

fn kernel_matrix(size: usize, f: impl Fn(usize, usize) -> Result<C64> + Sync) -> Result<DMatrix<C64>> {
    let entries: Vec<C64> = (0..size * size)
        .into_par_iter()
        .map(|idx| f(idx % size + 1, idx / size + 1))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_vec(size, size, entries))
}

/// Order-one check of a continuum kernel on `grid × grid`, diagonal excluded.
pub fn check_linear_continuum(kernel: &dyn ContinuumKernel, grid: &[f64], tolerance: f64) -> Result<IdentityReport> {
    let pairs: Vec<(f64, f64)> = off_diagonal_pairs(grid);
    let violations: Vec<f64> = pairs
        .par_iter()
        .map(|&(kp, k)| {
            let a = (kernel.a_hat(kp, k)? + kernel.a_hat(k, kp)?.conj()).norm();
            let b = (kernel.b_hat(kp, k)? - kernel.b_hat(k, kp)?).norm();
            Ok(a.max(b))
        })
        .collect::<Result<_>>()?;
    let worst = violations.into_iter().fold(0.0, f64::max);
    Ok(IdentityReport::decide(
        kernel.regime().name(),
        Check::Linear,
        worst,
        tolerance,
        grid.len(),
        grid.len(),
    ))
}

fn off_diagonal_pairs(grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter()
        .flat_map(|&kp| grid.iter().filter(move |&&k| k != kp).map(move |&k| (kp, k)))
        .collect()
}

/// Order-one check of the sudden half-line coefficients on `grid × grid`.
pub fn check_linear_sudden(terms: &SemiopenPerturbative, grid: &[f64], tolerance: f64) -> IdentityReport {
    let mu = terms.mu;
    let w = |k: f64| k.hypot(mu);
    let alpha1 = |kp: f64, k: f64| terms.pv1(kp, k) / (w(k) - w(kp));
    let worst = off_diagonal_pairs(grid)
        .into_iter()
        .map(|(kp, k)| {
            let a = (alpha1(kp, k) + alpha1(k, kp)).abs();
            let b = (terms.beta1(kp, k) - terms.beta1(k, kp)).abs();
            a.max(b)
        })
        .fold(0.0, f64::max);
    IdentityReport::decide(terms.regime_name(), Check::Linear, worst, tolerance, grid.len(), grid.len())
}

/// Order-two off-diagonal check on truncated matrices, without tail correction.
pub fn check_quadratic_matrix(
    regime: &str,
    orders: [&DMatrix<f64>; 4],
    tolerance: f64,
) -> Result<IdentityReport> {
    let [a1, b1, a2, b2] = orders;
    let n = a1.nrows();
    if [b1, a2, b2].iter().any(|m| m.shape() != (n, n)) || !a1.is_square() {
        return Err(invalid("matrix", "all four matrices must be square and of equal size"));
    }
    let mut worst = 0.0f64;
    for sign in [1.0, -1.0] {
        let s = a1 + b1 * sign;
        let lhs = &s * &s;
        let rhs = a2 + a2.transpose() + (b2 - b2.transpose()) * sign;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max((lhs[(i, j)] - rhs[(i, j)]).abs());
                }
            }
        }
    }
    Ok(IdentityReport::decide(regime, Check::QuadraticOffDiagonal, worst, tolerance, n, n))
}

/// Inner sums are carried to this multiple of the checked size.
pub const INNER_FACTOR: usize = 500;

/// Order-two off-diagonal check for the near-Dirichlet cavity over modes `1..=size`.
///
/// The intermediate sum runs to `500·size`; its `∝ 1/l²` remainder is extrapolated from
/// the last decade and the result is inconclusive when that extrapolation is itself
/// uncertain beyond `tolerance`.
pub fn check_quadratic_cavity(eta1: f64, eta2: f64, size: usize, tolerance: f64) -> Result<IdentityReport> {
    if size < 2 {
        return Err(invalid("size", "need at least two modes for off-diagonal entries"));
    }
    let c = CavityNearDirichlet { eta1, eta2 };
    let inner = INNER_FACTOR * size;
    let pairs: Vec<(usize, usize)> = (1..=size)
        .flat_map(|m| (1..=size).filter(move |&n| n != m).map(move |n| (m, n)))
        .collect();
    let results: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .flat_map_iter(|&(m, n)| {
            [1.0, -1.0].into_iter().map(move |sign| {
                let s = |i: usize, j: usize| c.alpha1(i, j) + sign * c.beta1(i, j);
                let terms: Vec<f64> = (1..=inner).map(|l| s(m, l) * s(l, n)).collect();
                let partial = |upto: usize| pairwise_sum(&terms[..upto]);
                let (s1, s2, s3) = (partial(inner), partial(inner / 10), partial(inner / 100));
                let tail = (s1 - s2) / 9.0;
                let tail_prev = (s2 - s3) / 9.0 / 10.0;
                let lhs = s1 + tail;
                let rhs = c.alpha2(m, n) + c.alpha2(n, m) + sign * (c.beta2(m, n) - c.beta2(n, m));
                ((lhs - rhs).abs(), tail.abs(), (tail - tail_prev).abs())
            })
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let tail = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let uncertainty = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut report = IdentityReport::decide("cavity_near_dirichlet", Check::QuadraticOffDiagonal, worst, tolerance, size, size);
    report.tail = Some(tail);
    if report.outcome == Outcome::Fail && uncertainty >= tolerance {
        report.outcome = Outcome::Inconclusive;
    }
    Ok(report)
}

/// Order-two off-diagonal check of the sudden half-line coefficients on `grid × grid`.
///
/// The intermediate wavenumber integral is split into principal-value pieces on
/// `[0, l_cut]` and a pole-free remainder beyond.
pub fn check_quadratic_semiopen(
    terms: &SemiopenPerturbative,
    grid: &[f64],
    tolerance: f64,
    cfg: &QuadConfig,
) -> Result<IdentityReport> {
    let mu = terms.mu;
    let w = move |k: f64| k.hypot(mu);
    let top = grid.iter().fold(0.0f64, |m, &k| m.max(k));
    if !(grid.iter().all(|&k| k > 0.0) && top > 0.0) {
        return Err(invalid("grid", "wavenumbers must be positive"));
    }
    let cut = 20.0 * top;
    let residuals: Vec<f64> = off_diagonal_pairs(grid)
        .par_iter()
        .map(|&(kp, k)| {
            let mut worst = 0.0f64;
            for sign in [1.0, -1.0] {
                let lhs = semiopen_square(terms, kp, k, sign, cut, cfg)?;
                let alpha2 = |a: f64, b: f64| terms.pv2(a, b) / (w(b) - w(a));
                let rhs = alpha2(kp, k) + alpha2(k, kp) + sign * (terms.beta2(kp, k) - terms.beta2(k, kp));
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let worst = residuals.into_iter().fold(0.0, f64::max);
    Ok(IdentityReport::decide(
        terms.regime_name(),
        Check::QuadraticOffDiagonal,
        worst,
        tolerance,
        grid.len(),
        grid.len(),
    ))
}

/// `∫ (α₁ ± β₁)(k', l) (α₁ ± β₁)(l, k) dl` for `k ≠ k'`.
fn semiopen_square(terms: &SemiopenPerturbative, kp: f64, k: f64, sign: f64, cut: f64, cfg: &QuadConfig) -> Result<f64> {
    let mu = terms.mu;
    let w = move |x: f64| x.hypot(mu);
    // α₁(k', l) = p(l)/(l − k'), α₁(l, k) = q(l)/(k − l)
    let p = |l: f64| terms.pv1(kp, l) * (w(l) + w(kp)) / (l + kp);
    let q = |l: f64| terms.pv1(l, k) * (w(k) + w(l)) / (k + l);
    let dk = k - kp;
    let g1 = |l: f64| p(l) * q(l) / dk + sign * p(l) * terms.beta1(l, k);
    let g2 = |l: f64| p(l) * q(l) / dk + sign * terms.beta1(kp, l) * q(l);
    let half = 0.5 * (k - kp).abs().min(kp).min(k);
    let pv1 = principal_value(g1, kp, 0.0, cut, half, cfg)?.value;
    let pv2 = principal_value(g2, k, 0.0, cut, half, cfg)?.value;
    let bb = integrate(|l: f64| terms.beta1(kp, l) * terms.beta1(l, k), 0.0, cut, cfg)?.value;
    let factor = |a: f64, b: f64| {
        let alpha = terms.pv1(a, b) / (w(b) - w(a));
        alpha + sign * terms.beta1(a, b)
    };
    let tail = integrate_to_infinity(|l: f64| factor(kp, l) * factor(l, k), cut, cfg)?.value;
    Ok(pv1 - pv2 + bb + tail)
}
