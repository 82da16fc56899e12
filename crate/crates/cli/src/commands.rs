//! The six scenario commands. Each computes a [`CsvTable`] plus the settings
//! and results that go into the manifest; [`run`] writes both to disk.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use robin_dce::nalgebra::DMatrix;
use robin_dce::Complex64;
use robin_dce::continuous::{ContinuumKernel, DiscreteKernel};
use robin_dce::entanglement::{negativity_scan, ScanConfig, PACKET_NODES};
use robin_dce::mirror::{mirror_small_a, mirror_small_a_beta, uniform_mirror_exact};
use robin_dce::modes::{cavity_eigenvalues, ground_mode, robin_phase_shift, RobinParameter};
use robin_dce::quad::QuadConfig;
use robin_dce::spectra::{cavity_occupations, flux_spectrum, FluxConfig, FluxSpectrum};
use robin_dce::sudden::{
    cavity_near_dirichlet_matrix, cavity_sudden_far_order, DiscreteBogoliubovMatrix, semiopen_sudden_exact, Order, SemiopenPerturbative,
};
use robin_dce::verify::{
    check_linear_continuum, check_linear_discrete, check_linear_matrix, check_linear_sudden, check_quadratic_cavity,
    check_quadratic_semiopen, Check, IdentityReport, Outcome, INNER_FACTOR,
};
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::output::{header_lines, write_file, write_manifest, Cell, CsvTable, Manifest, Status};
use crate::scenario::{CavityBoundary, Scenario, SemiopenBoundary, Setup, SuddenStrength};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Flux,
    Negativity,
    Sudden,
    Modes,
    MirrorExact,
    VerifyIdentities,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Flux,
        Command::Negativity,
        Command::Sudden,
        Command::Modes,
        Command::MirrorExact,
        Command::VerifyIdentities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Flux => "flux",
            Command::Negativity => "negativity",
            Command::Sudden => "sudden",
            Command::Modes => "modes",
            Command::MirrorExact => "mirror-exact",
            Command::VerifyIdentities => "verify-identities",
        }
    }

    /// Whether the command has something to compute for this scenario.
    pub fn applies_to(self, scenario: &Scenario) -> bool {
        match self {
            Command::Negativity => !scenario.is_cavity(),
            Command::Sudden => scenario.sudden.strength != SuddenStrength::None,
            _ => true,
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Command-line adjustments layered over the scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Multiplies the scenario's own `numerics.tolerance_scale`.
    pub tolerance_scale: Option<f64>,
    /// Replaces the initial inner cutoff of the flux integrals.
    pub k_max_override: Option<f64>,
}

/// Headline numbers used by sweep summaries.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Summary {
    pub n_robin: Option<f64>,
    pub n_mirror: Option<f64>,
    pub peak_n_robin: Option<f64>,
    pub peak_n_mirror: Option<f64>,
    pub peak_bhat_robin: Option<f64>,
    pub peak_bhat_mirror: Option<f64>,
}

/// Everything a command produces before it touches the filesystem.
#[derive(Debug, Clone, Default)]
pub struct Computed {
    pub table: CsvTable,
    pub tolerances: Vec<(String, Value)>,
    pub truncations: Vec<(String, Value)>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    /// Set when the output contains a failed check.
    pub failure: Option<String>,
    pub summary: Summary,
}

impl Computed {
    fn tolerance(&mut self, key: &str, v: impl Into<Value>) {
        self.tolerances.push((format!("tolerance.{key}"), v.into()));
    }

    fn truncation(&mut self, key: &str, v: impl Into<Value>) {
        self.truncations.push((format!("truncation.{key}"), v.into()));
    }

    fn result(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: Status,
    pub csv: Option<PathBuf>,
    pub manifest: PathBuf,
    pub diagnostic: Option<String>,
    pub summary: Summary,
}

fn unsupported(command: Command, reason: impl Into<String>) -> CliError {
    CliError::Unsupported {
        command: command.name(),
        reason: reason.into(),
    }
}

fn tolerance_scale(scenario: &Scenario, opts: &RunOptions) -> f64 {
    scenario.numerics.tolerance_scale * opts.tolerance_scale.unwrap_or(1.0)
}

pub fn flux_config(scenario: &Scenario, opts: &RunOptions) -> FluxConfig {
    let s = tolerance_scale(scenario, opts);
    FluxConfig {
        grid_points: scenario.flux.grid_points,
        kbar_max: scenario.flux.kbar_max,
        convergence_tol: scenario.numerics.convergence_tol * s,
        k_max: opts.k_max_override.or(scenario.numerics.k_max),
        max_doublings: scenario.numerics.max_doublings,
        quad: QuadConfig::new(0.0, scenario.numerics.rel_tol * s),
    }
}

/// Run `f` on a pool of the requested size, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Compute a command's output without writing anything.
pub fn compute(scenario: &Scenario, command: Command, opts: &RunOptions) -> Result<Computed> {
    match command {
        Command::Flux => flux(scenario, opts),
        Command::Negativity => negativity(scenario),
        Command::Sudden => sudden(scenario),
        Command::Modes => modes(scenario),
        Command::MirrorExact => mirror_exact(scenario),
        Command::VerifyIdentities => verify(scenario, opts),
    }
}

pub fn artifact_stem(scenario: &Scenario, command: Command) -> String {
    format!("{}.{}", scenario.name, command.name())
}

/// Compute, then write `<name>.<command>.csv` and `<name>.<command>.manifest.json` into `out_dir`.
///
/// Numerical failures still produce a manifest, with `status = "error"` and the
/// diagnostic; the CSV is written only when the computation finished.
pub fn run(scenario: &Scenario, command: Command, out_dir: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let started = Instant::now();
    let computed = with_threads(opts.threads, || compute(scenario, command, opts))?;
    let wall = started.elapsed().as_secs_f64();
    let stem = artifact_stem(scenario, command);
    let manifest_path = out_dir.join(format!("{stem}.manifest.json"));
    let mut manifest = Manifest {
        tool: "robin-dce",
        version: env!("CARGO_PKG_VERSION"),
        scenario: scenario.name.clone(),
        source: scenario.source.display().to_string(),
        command: command.name().to_string(),
        status: Status::Ok,
        diagnostic: None,
        csv: None,
        rows: 0,
        threads: opts.threads.unwrap_or_else(rayon::current_num_threads),
        parameters: Manifest::parameters_of(scenario),
        overrides: overrides(opts),
        tolerances: Map::new(),
        truncations: Map::new(),
        results: Map::new(),
        warnings: Vec::new(),
        wall_time_s: wall,
    };
    let computed = match computed {
        Ok(c) => c,
        Err(CliError::Numerics(e)) => {
            manifest.status = Status::Error;
            manifest.diagnostic = Some(e.to_string());
            write_manifest(&manifest_path, &manifest)?;
            return Ok(RunOutcome {
                status: Status::Error,
                csv: None,
                manifest: manifest_path,
                diagnostic: manifest.diagnostic,
                summary: Summary::default(),
            });
        }
        Err(e) => return Err(e),
    };
    let settings: Vec<(String, Value)> = override_lines(opts)
        .into_iter()
        .chain(computed.tolerances.iter().cloned())
        .chain(computed.truncations.iter().cloned())
        .collect();
    let csv_name = format!("{stem}.csv");
    let csv_path = out_dir.join(&csv_name);
    let bytes = computed.table.render(&header_lines(scenario, command.name(), &settings))?;
    write_file(&csv_path, &bytes)?;

    let strip = |items: &[(String, Value)], prefix: &str| -> Map<String, Value> {
        items
            .iter()
            .map(|(k, v)| (k.trim_start_matches(prefix).to_string(), v.clone()))
            .collect()
    };
    manifest.status = if computed.failure.is_some() { Status::Failed } else { Status::Ok };
    manifest.diagnostic = computed.failure.clone();
    manifest.csv = Some(csv_name);
    manifest.rows = computed.table.rows.len();
    manifest.tolerances = strip(&computed.tolerances, "tolerance.");
    manifest.truncations = strip(&computed.truncations, "truncation.");
    manifest.results = computed.results;
    manifest.warnings = computed.warnings;
    write_manifest(&manifest_path, &manifest)?;
    Ok(RunOutcome {
        status: manifest.status,
        csv: Some(csv_path),
        manifest: manifest_path,
        diagnostic: manifest.diagnostic,
        summary: computed.summary,
    })
}

fn override_lines(opts: &RunOptions) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    if let Some(s) = opts.tolerance_scale {
        out.push(("override.tolerance_scale".to_string(), json!(s)));
    }
    if let Some(k) = opts.k_max_override {
        out.push(("override.k_max".to_string(), json!(format!("{k:?} /mm"))));
    }
    out
}

fn overrides(opts: &RunOptions) -> Map<String, Value> {
    override_lines(opts)
        .into_iter()
        .map(|(k, v)| (k.trim_start_matches("override.").to_string(), v))
        .collect()
}

fn spectrum_results(c: &mut Computed, side: &str, s: &FluxSpectrum) {
    let (kb, n) = s.peak();
    c.result(&format!("{side}.total"), s.total);
    c.result(&format!("{side}.tail_estimate"), s.tail_estimate);
    c.result(&format!("{side}.convergence_ratio"), s.convergence_ratio);
    c.result(&format!("{side}.peak_kbar"), kb);
    c.result(&format!("{side}.peak_n"), n);
    c.truncation(&format!("{side}.k_max_used"), format!("{:?} /mm", s.k_max_used));
}

fn flux(scenario: &Scenario, opts: &RunOptions) -> Result<Computed> {
    if scenario.is_cavity() {
        return cavity_flux(scenario);
    }
    let omega_d = scenario
        .flux_omega_d()
        .ok_or_else(|| unsupported(Command::Flux, "drive has no frequency; set analysis.flux.omega_d"))?;
    let cfg = flux_config(scenario, opts);
    let kernels = scenario.semiopen_kernels()?.expect("semiopen geometry");
    let robin = kernels
        .robin
        .as_deref()
        .map(|k| flux_spectrum(k, omega_d, &cfg))
        .transpose()?;
    let mirror = kernels
        .mirror
        .as_ref()
        .map(|k| flux_spectrum(k, omega_d, &cfg))
        .transpose()?;

    let mut c = Computed {
        table: CsvTable::new(&["kbar", "n_robin", "n_mirror", "ratio", "inner_error"]),
        warnings: kernels.warnings,
        ..Computed::default()
    };
    c.tolerance("convergence_tol", cfg.convergence_tol);
    c.tolerance("inner_rel_tol", cfg.quad.rel_tol);
    c.truncation("grid_points", cfg.grid_points);
    c.truncation("kbar_max", cfg.kbar_max);
    c.truncation("max_doublings", cfg.max_doublings);
    c.truncation(
        "k_max_initial",
        cfg.k_max.map_or_else(|| "auto".to_string(), |k| format!("{k:?} /mm")),
    );
    let grid = cfg.kbar_grid();
    for (i, &kb) in grid.iter().enumerate() {
        let r = robin.as_ref().map(|s| s.n[i]);
        let m = mirror.as_ref().map(|s| s.n[i]);
        let ratio = r.zip(m).map(|(r, m)| if m == 0.0 { f64::NAN } else { r / m });
        let err = robin
            .iter()
            .chain(mirror.iter())
            .map(|s| s.inner_error[i])
            .fold(0.0f64, f64::max);
        c.table
            .push(vec![kb.into(), Cell::opt(r), Cell::opt(m), Cell::opt(ratio), err.into()]);
    }
    c.result("omega_d", omega_d);
    if let Some(s) = &robin {
        spectrum_results(&mut c, "robin", s);
        c.summary.n_robin = Some(s.total);
        c.summary.peak_n_robin = Some(s.peak().1);
    }
    if let Some(s) = &mirror {
        spectrum_results(&mut c, "mirror", s);
        c.summary.n_mirror = Some(s.total);
        c.summary.peak_n_mirror = Some(s.peak().1);
    }
    if let (Some(r), Some(m)) = (&robin, &mirror) {
        c.result("mirror_to_robin_total", m.total / r.total);
    }
    Ok(c)
}

fn cavity_flux(scenario: &Scenario) -> Result<Computed> {
    let (modes, truncation) = (scenario.flux.modes, scenario.flux.truncation);
    let kernels = scenario.cavity_kernels(truncation)?.expect("cavity geometry");
    let robin = kernels
        .robin
        .as_deref()
        .map(|k| cavity_occupations(k, modes, truncation))
        .transpose()?;
    let mirror = kernels
        .mirror
        .as_ref()
        .map(|k| cavity_occupations(k, modes, truncation))
        .transpose()?;
    let reference: &dyn DiscreteKernel = match (&kernels.robin, &kernels.mirror) {
        (Some(r), _) => r.as_ref(),
        (None, Some(m)) => m,
        (None, None) => return Err(unsupported(Command::Flux, "no kernel for this cavity")),
    };
    let mut c = Computed {
        table: CsvTable::new(&["mode", "omega", "n_robin", "n_mirror"]),
        warnings: kernels.warnings,
        ..Computed::default()
    };
    c.truncation("modes", modes);
    c.truncation("inner_modes", truncation);
    for m in 1..=modes {
        c.table.push(vec![
            m.into(),
            reference.frequency(m)?.into(),
            Cell::opt(robin.as_ref().map(|v| v[m - 1])),
            Cell::opt(mirror.as_ref().map(|v| v[m - 1])),
        ]);
    }
    let total = |v: &Vec<f64>| v.iter().sum::<f64>();
    let peak = |v: &Vec<f64>| v.iter().copied().fold(0.0f64, f64::max);
    c.summary.n_robin = robin.as_ref().map(total);
    c.summary.n_mirror = mirror.as_ref().map(total);
    c.summary.peak_n_robin = robin.as_ref().map(peak);
    c.summary.peak_n_mirror = mirror.as_ref().map(peak);
    if let Some(t) = c.summary.n_robin {
        c.result("robin.total", t);
    }
    if let Some(t) = c.summary.n_mirror {
        c.result("mirror.total", t);
    }
    Ok(c)
}

fn negativity(scenario: &Scenario) -> Result<Computed> {
    let kernels = match scenario.semiopen_kernels()? {
        Some(k) => k,
        None => return Err(unsupported(Command::Negativity, "the negativity scan needs a half-line continuum")),
    };
    let omega_d = scenario
        .negativity_omega_d()
        .ok_or_else(|| unsupported(Command::Negativity, "drive has no frequency; set analysis.negativity.omega_d"))?;
    let cfg = ScanConfig {
        delta_k: scenario.negativity.delta_k,
        points: scenario.negativity.points,
        max_ratio: scenario.negativity.max_ratio,
    };
    let robin: Option<&dyn ContinuumKernel> = kernels.robin.as_deref();
    let mirror: Option<&dyn ContinuumKernel> = kernels.mirror.as_ref().map(|m| m as &dyn ContinuumKernel);
    let (a, b) = match (robin, mirror) {
        (Some(r), Some(m)) => (r, m),
        (Some(r), None) => (r, r),
        (None, Some(m)) => (m, m),
        (None, None) => return Err(unsupported(Command::Negativity, "no kernel for this scenario")),
    };
    let rows = negativity_scan(a, b, omega_d, &cfg)?;
    let mut c = Computed {
        table: CsvTable::new(&[
            "delta_omega_over_omega_d",
            "Bhat_robin",
            "Bhat_mirror",
            "negativity_robin",
            "negativity_mirror",
        ]),
        warnings: kernels.warnings,
        ..Computed::default()
    };
    c.truncation("packet_width", format!("{:?} /mm", cfg.width(omega_d)));
    c.truncation("packet_nodes", PACKET_NODES);
    c.truncation("points", cfg.points);
    c.truncation("max_ratio", cfg.max_ratio);
    let (has_r, has_m) = (robin.is_some(), mirror.is_some());
    for r in &rows {
        c.table.push(vec![
            r.ratio.into(),
            Cell::opt(has_r.then_some(r.bhat_robin)),
            Cell::opt(has_m.then_some(if has_r { r.bhat_mirror } else { r.bhat_robin })),
            Cell::opt(has_r.then_some(r.negativity_robin)),
            Cell::opt(has_m.then_some(if has_r { r.negativity_mirror } else { r.negativity_robin })),
        ]);
    }
    let peak = |f: fn(&robin_dce::entanglement::ScanRow) -> f64| rows.iter().map(f).fold(0.0f64, f64::max);
    c.result("omega_d", omega_d);
    if has_r {
        c.summary.peak_bhat_robin = Some(peak(|r| r.bhat_robin));
        c.result("robin.peak_bhat", peak(|r| r.bhat_robin));
    }
    if has_m {
        let p = if has_r { peak(|r| r.bhat_mirror) } else { peak(|r| r.bhat_robin) };
        c.summary.peak_bhat_mirror = Some(p);
        c.result("mirror.peak_bhat", p);
    }
    if has_r && has_m {
        let dev = rows
            .iter()
            .map(|r| ((r.bhat_robin - r.bhat_mirror) / r.bhat_mirror).abs())
            .fold(0.0f64, f64::max);
        c.result("max_relative_deviation", dev);
        c.result("mirror_at_least_robin", rows.iter().all(|r| r.bhat_mirror >= r.bhat_robin));
    }
    Ok(c)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn semiopen_terms(scenario: &Scenario) -> Option<(SemiopenPerturbative, RobinParameter, RobinParameter)> {
    let Setup::Semiopen { mass, boundary } = scenario.setup else {
        return None;
    };
    match (boundary, scenario.sudden.strength) {
        (SemiopenBoundary::Far { robin_length }, SuddenStrength::Eta(eta)) => Some((
            SemiopenPerturbative::far(robin_length, eta, mass),
            RobinParameter::Finite(-robin_length),
            RobinParameter::Finite(-robin_length * (1.0 + eta)),
        )),
        (SemiopenBoundary::NearDirichlet, SuddenStrength::B(b)) => Some((
            SemiopenPerturbative::near_dirichlet(b, mass),
            RobinParameter::DIRICHLET,
            RobinParameter::Finite(b),
        )),
        _ => None,
    }
}

fn sudden(scenario: &Scenario) -> Result<Computed> {
    let order = Order::from_int(scenario.sudden.order)?;
    let mut c = Computed::default();
    c.truncation("order", scenario.sudden.order as usize);
    if let Some((terms, d, d_prime)) = semiopen_terms(scenario) {
        let s = &scenario.sudden;
        let grid = linspace(s.k_min, s.k_max, s.points);
        c.table = CsvTable::new(&["regime", "k_prime", "k", "alpha_delta", "alpha_pv", "beta", "beta_exact", "order"]);
        c.truncation("points", s.points);
        let pairs: Vec<(f64, f64)> = grid.iter().flat_map(|&kp| grid.iter().map(move |&k| (kp, k))).collect();
        let rows: Vec<(f64, f64, f64, f64, f64, f64)> = pairs
            .par_iter()
            .map(|&(kp, k)| {
                let p = terms.sample(kp, k, order);
                let exact = semiopen_sudden_exact(kp, k, d, d_prime, terms.mu)?;
                Ok((kp, k, p.alpha.delta_coeff, p.alpha.pv_coeff, p.beta, exact.beta))
            })
            .collect::<robin_dce::Result<_>>()?;
        let mut worst = 0.0f64;
        for (kp, k, delta, pv, beta, exact) in rows {
            worst = worst.max((beta - exact).abs());
            let diag = if kp == k { Cell::Float(delta) } else { Cell::Empty };
            c.table.push(vec![
                terms.regime_name().into(),
                kp.into(),
                k.into(),
                diag,
                pv.into(),
                beta.into(),
                exact.into(),
                (order.as_int() as usize).into(),
            ]);
        }
        c.result("max_beta_deviation_from_exact", worst);
        return Ok(c);
    }
    let (Setup::Cavity { boundary, .. }, SuddenStrength::Cavity { eta1, eta2 }) = (scenario.setup, scenario.sudden.strength)
    else {
        return Err(unsupported(Command::Sudden, "no sudden-change coefficients for a moving mirror"));
    };
    let size = scenario.sudden.size;
    let matrix = match boundary {
        CavityBoundary::Far { kappa1, kappa2 } => {
            let table = cavity_eigenvalues(kappa1, kappa2, size)?;
            cavity_sudden_far_order(&table, eta1, eta2, order)?
        }
        CavityBoundary::NearDirichlet => cavity_near_dirichlet_matrix(size, eta1, eta2, order)?,
        CavityBoundary::Mirror => {
            return Err(unsupported(Command::Sudden, "no sudden-change coefficients for a moving mirror"));
        }
    };
    c.truncation("size", size);
    c.table = CsvTable::new(&["regime", "m", "n", "Re_alpha", "Im_alpha", "Re_beta", "Im_beta", "order"]);
    for (m, n, a, b) in matrix.rows() {
        c.table.push(vec![
            matrix.regime.into(),
            m.into(),
            n.into(),
            a.re.into(),
            a.im.into(),
            b.re.into(),
            b.im.into(),
            (matrix.order.as_int() as usize).into(),
        ]);
    }
    Ok(c)
}

fn modes(scenario: &Scenario) -> Result<Computed> {
    let mut c = Computed::default();
    match scenario.setup {
        Setup::Cavity { length, .. } => {
            let m_max = scenario.modes.m_max;
            c.truncation("m_max", m_max);
            c.table = CsvTable::new(&["m", "q", "omega", "delta", "norm_factor", "residual"]);
            match scenario.modes.kappa {
                Some((k1, k2)) => {
                    let table = cavity_eigenvalues(k1, k2, m_max)?.with_length(length)?;
                    let mut worst = 0.0f64;
                    for (i, &q) in table.roots().iter().enumerate() {
                        let res = table.residual(q);
                        worst = worst.max(res.abs());
                        c.table.push(vec![
                            (i + 1).into(),
                            q.into(),
                            (q / length).into(),
                            table.phase(q).into(),
                            table.norm_factor(q).into(),
                            res.into(),
                        ]);
                    }
                    c.result("max_residual", worst);
                }
                None => {
                    // Dirichlet at both ends
                    for m in 1..=m_max {
                        let q = std::f64::consts::PI * m as f64;
                        c.table
                            .push(vec![m.into(), q.into(), (q / length).into(), 0.0.into(), 1.0.into(), 0.0.into()]);
                    }
                    c.result("max_residual", 0.0);
                }
            }
        }
        Setup::Semiopen { mass, boundary } => {
            let d = match boundary {
                SemiopenBoundary::Far { robin_length } => RobinParameter::Finite(-robin_length),
                _ => RobinParameter::DIRICHLET,
            };
            let s = &scenario.modes;
            c.truncation("points", s.points);
            c.table = CsvTable::new(&["k", "omega", "phase_shift"]);
            for k in linspace(s.k_min, s.k_max, s.points) {
                c.table
                    .push(vec![k.into(), k.hypot(mass).into(), robin_phase_shift(k, d).into()]);
            }
            c.result("robin_parameter", d.to_string());
            match ground_mode(mass, d) {
                Some(g) => c.result("ground_mode_frequency", g.frequency),
                None => c.result("ground_mode_frequency", Value::Null),
            }
        }
    }
    Ok(c)
}

fn mirror_exact(scenario: &Scenario) -> Result<Computed> {
    let s = &scenario.mirror;
    let mut c = Computed {
        table: CsvTable::new(&[
            "acceleration",
            "k_prime",
            "k",
            "alpha_exact",
            "alpha_error",
            "beta_exact",
            "beta_error",
            "alpha_small_a",
            "beta_small_a",
        ]),
        ..Computed::default()
    };
    c.truncation(
        "regulator",
        s.regulator.map_or_else(|| "1e-12 k".to_string(), |r| format!("{r:?} /mm")),
    );
    let points: Vec<(f64, f64, f64)> = s
        .accelerations
        .iter()
        .flat_map(|&a| s.k_prime.iter().flat_map(move |&kp| s.k.iter().map(move |&k| (a, kp, k))))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(a, kp, k)| {
            let exact = uniform_mirror_exact(kp, k, a, s.regulator)?;
            let small_alpha = mirror_small_a(kp, k, a).ok().map(|m| m.alpha);
            let small_beta = mirror_small_a_beta(kp, k, a)?;
            Ok(vec![
                a.into(),
                kp.into(),
                k.into(),
                exact.alpha.value.into(),
                exact.alpha.error.into(),
                exact.beta.value.into(),
                exact.beta.error.into(),
                Cell::opt(small_alpha),
                small_beta.into(),
            ])
        })
        .collect::<robin_dce::Result<Vec<Vec<Cell>>>>()?;
    for r in rows {
        c.table.push(r);
    }
    if s.k_prime.iter().any(|kp| s.k.iter().any(|k| kp > k)) {
        c.warnings
            .push("for k' > k the alpha integrand has a stationary point; the small-a column does not apply there".into());
    }
    Ok(c)
}

/// The linear identity concerns the first-order parts, so the identity is removed from `α`.
fn check_linear_first_order(m: &DiscreteBogoliubovMatrix, tolerance: f64) -> robin_dce::Result<IdentityReport> {
    let alpha1 = &m.alpha - DMatrix::<Complex64>::identity(m.size(), m.size());
    check_linear_matrix(m.regime, &alpha1, &m.beta, tolerance)
}

fn verify(scenario: &Scenario, opts: &RunOptions) -> Result<Computed> {
    let s = tolerance_scale(scenario, opts);
    let id = &scenario.identities;
    let (td, tc, tq) = (id.tolerance_discrete * s, id.tolerance_continuum * s, id.tolerance_quadratic * s);
    let mut c = Computed::default();
    c.tolerance("discrete", td);
    c.tolerance("continuum", tc);
    c.tolerance("quadratic", tq);
    let mut reports: Vec<IdentityReport> = Vec::new();
    let sudden_name = |mut r: IdentityReport| {
        r.regime = format!("sudden_{}", r.regime);
        r
    };
    match scenario.setup {
        Setup::Semiopen { .. } => {
            let kernels = scenario.semiopen_kernels()?.expect("semiopen geometry");
            c.warnings.extend(kernels.warnings.iter().cloned());
            c.truncation("grid", json!(id.grid));
            if let Some(k) = kernels.robin.as_deref() {
                reports.push(check_linear_continuum(k, &id.grid, tc)?);
            }
            if let Some(k) = &kernels.mirror {
                reports.push(check_linear_continuum(k, &id.grid, tc)?);
            }
            match semiopen_terms(scenario) {
                Some((terms, _, _)) => {
                    let quad = QuadConfig::new(1e-15, 1e-10).scaled(s);
                    c.tolerance("quadratic_quadrature_rel", quad.rel_tol);
                    c.truncation("quadratic_cutoff_factor", 20);
                    reports.push(sudden_name(check_linear_sudden(&terms, &id.grid, td)));
                    reports.push(sudden_name(check_quadratic_semiopen(&terms, &id.grid, tq, &quad)?));
                }
                None => reports.push(IdentityReport::not_applicable("moving_mirror", Check::QuadraticOffDiagonal)),
            }
        }
        Setup::Cavity { boundary, .. } => {
            let kernels = scenario.cavity_kernels(id.size)?.expect("cavity geometry");
            c.warnings.extend(kernels.warnings.iter().cloned());
            c.truncation("size", id.size);
            if let Some(k) = kernels.robin.as_deref() {
                reports.push(check_linear_discrete(k, id.size, td)?);
            }
            if let Some(k) = &kernels.mirror {
                reports.push(check_linear_discrete(k, id.size, td)?);
            }
            match (boundary, scenario.sudden.strength) {
                (CavityBoundary::Far { kappa1, kappa2 }, SuddenStrength::Cavity { eta1, eta2 }) => {
                    let table = cavity_eigenvalues(kappa1, kappa2, id.size)?;
                    let m = cavity_sudden_far_order(&table, eta1, eta2, Order::First)?;
                    reports.push(sudden_name(check_linear_first_order(&m, td)?));
                    reports.push(sudden_name(IdentityReport::not_applicable("cavity_far", Check::QuadraticOffDiagonal)));
                }
                (CavityBoundary::NearDirichlet, SuddenStrength::Cavity { eta1, eta2 }) => {
                    let m = cavity_near_dirichlet_matrix(id.size, eta1, eta2, Order::First)?;
                    reports.push(sudden_name(check_linear_first_order(&m, td)?));
                    c.truncation("quadratic_size", id.quadratic_size);
                    c.truncation("quadratic_inner_modes", INNER_FACTOR * id.quadratic_size);
                    reports.push(sudden_name(check_quadratic_cavity(eta1, eta2, id.quadratic_size, tq)?));
                }
                _ => reports.push(IdentityReport::not_applicable("rigid_cavity_mirror", Check::QuadraticOffDiagonal)),
            }
        }
    }
    c.table = CsvTable::new(&IdentityReport::CSV_HEADER.split(',').collect::<Vec<_>>());
    for r in &reports {
        c.table.push(r.csv_row().split(',').map(|f| Cell::Text(f.to_string())).collect());
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| r.outcome == Outcome::Fail)
        .map(|r| format!("{} {}", r.regime, r.check.name()))
        .collect();
    for r in reports.iter().filter(|r| r.outcome == Outcome::Inconclusive) {
        c.warnings.push(format!("{} {} is inconclusive: {r}", r.regime, r.check.name()));
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    c.result("checks", reports.len());
    c.result("passed", passed);
    if !failed.is_empty() {
        c.failure = Some(format!("identity checks failed: {}", failed.join(", ")));
    }
    Ok(c)
}
