//! Scenario files: TOML with unit-annotated quantities, strictly validated.
//!
//! Validation collects every problem before failing, so a broken file reports
//! all missing sections and bad fields at once. Every resolved value, defaults
//! included, is recorded in [`Scenario::parameters`] for CSV headers and manifests.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use robin_dce::continuous::{
    CavityFarKernel, CavityNearDirichletKernel, ContinuumKernel, DiscreteKernel, RigidCavityMirrorKernel,
    SemiopenFarKernel, SemiopenNearDirichletKernel,
};
use robin_dce::drive::DriveProfile;
use robin_dce::mirror::{AccelerationProfile, MovingMirrorKernel};
use robin_dce::modes::cavity_eigenvalues;
use toml::{Table, Value};

use crate::error::{CliError, Result};
use crate::units::{format_quantity, parse_quantity, Dimension};

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Quantity(f64, Dimension),
    Integer(i64),
    Text(String),
    Flag(bool),
    List(Vec<f64>, Dimension),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Quantity(v, d) => f.write_str(&format_quantity(*v, *d)),
            ParamValue::Integer(i) => write!(f, "{i}"),
            ParamValue::Text(s) => f.write_str(s),
            ParamValue::Flag(b) => write!(f, "{b}"),
            ParamValue::List(vs, d) => {
                let items: Vec<String> = vs.iter().map(|v| format!("{v:?}")).collect();
                write!(f, "[{}]", items.join(", "))?;
                match d {
                    Dimension::Dimensionless => Ok(()),
                    d => write!(f, " {}", d.symbol()),
                }
            }
        }
    }
}

impl ParamValue {
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let with_unit = |v: serde_json::Value, d: Dimension| match d {
            Dimension::Dimensionless => v,
            d => json!({ "value": v, "unit": d.symbol() }),
        };
        match self {
            ParamValue::Quantity(v, d) => with_unit(json!(v), *d),
            ParamValue::Integer(i) => json!(i),
            ParamValue::Text(s) => json!(s),
            ParamValue::Flag(b) => json!(b),
            ParamValue::List(vs, d) => with_unit(json!(vs), *d),
        }
    }
}

/// One resolved scenario value, keyed by its dotted path.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub path: String,
    pub value: ParamValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiopenBoundary {
    Far { robin_length: f64 },
    NearDirichlet,
    Mirror,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityBoundary {
    Far { kappa1: f64, kappa2: f64 },
    NearDirichlet,
    Mirror,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setup {
    Semiopen { mass: f64, boundary: SemiopenBoundary },
    Cavity { length: f64, boundary: CavityBoundary },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriveShape {
    Sinusoid { omega_d: f64 },
    WindowedSinusoid { omega_d: f64, ramp: f64 },
    Sampled { dt: f64, values: Vec<f64> },
    Constant,
}

/// A drive block: `amplitude` is ε for Robin drives, `b` in mm for the
/// near-Dirichlet half-line, and the acceleration in mm⁻¹ for mirrors.
/// Sampled drives carry their values directly and ignore it.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub shape: DriveShape,
    pub amplitude: f64,
    pub t0: f64,
    pub tf: f64,
}

impl DriveSpec {
    pub fn omega_d(&self) -> Option<f64> {
        match self.shape {
            DriveShape::Sinusoid { omega_d } | DriveShape::WindowedSinusoid { omega_d, .. } => Some(omega_d),
            _ => None,
        }
    }

    pub fn profile(&self) -> robin_dce::Result<DriveProfile> {
        match &self.shape {
            DriveShape::Sinusoid { omega_d } => DriveProfile::sinusoid(self.amplitude, *omega_d, self.t0, self.tf),
            DriveShape::WindowedSinusoid { omega_d, ramp } => {
                DriveProfile::windowed_sinusoid(self.amplitude, *omega_d, self.t0, self.tf, *ramp)
            }
            DriveShape::Sampled { dt, values } => DriveProfile::sampled(self.t0, *dt, values.clone()),
            DriveShape::Constant => {
                let (t0, tf, a) = (self.t0, self.tf, self.amplitude);
                DriveProfile::callback(t0, tf, move |_| a)
            }
        }
    }

    /// Read as a mirror acceleration profile.
    pub fn acceleration(&self) -> robin_dce::Result<AccelerationProfile> {
        match self.shape {
            DriveShape::Constant => AccelerationProfile::constant(self.amplitude, self.t0, self.tf),
            _ => AccelerationProfile::new(self.profile()?, Vec::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxSettings {
    pub grid_points: usize,
    pub kbar_max: f64,
    pub omega_d: Option<f64>,
    pub modes: usize,
    pub truncation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativitySettings {
    pub delta_k: Option<f64>,
    pub points: usize,
    pub max_ratio: f64,
    pub omega_d: Option<f64>,
}

/// Sudden-change strengths and grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SuddenSettings {
    /// `η` (far half-line, dimensionless), `b` (near-Dirichlet half-line, mm),
    /// or `(η₁, η₂)` for a cavity.
    pub strength: SuddenStrength,
    pub order: u8,
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuddenStrength {
    Eta(f64),
    B(f64),
    Cavity { eta1: f64, eta2: f64 },
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSettings {
    pub m_max: usize,
    pub kappa: Option<(f64, f64)>,
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorSettings {
    pub accelerations: Vec<f64>,
    pub k_prime: Vec<f64>,
    pub k: Vec<f64>,
    pub regulator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySettings {
    pub grid: Vec<f64>,
    pub size: usize,
    pub quadratic_size: usize,
    pub tolerance_discrete: f64,
    pub tolerance_continuum: f64,
    pub tolerance_quadratic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub tolerance_scale: f64,
    pub rel_tol: f64,
    pub convergence_tol: f64,
    pub max_doublings: usize,
    pub k_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub source: PathBuf,
    pub setup: Setup,
    pub compare_mirror: bool,
    /// One drive for the half-line and for a rigid cavity mirror, `(η₁, η₂)` for Robin cavities.
    pub drives: Vec<DriveSpec>,
    pub flux: FluxSettings,
    pub negativity: NegativitySettings,
    pub sudden: SuddenSettings,
    pub modes: ModeSettings,
    pub mirror: MirrorSettings,
    pub identities: IdentitySettings,
    pub numerics: Numerics,
    pub parameters: Vec<Param>,
    /// The parsed file, kept so sweeps can substitute values and revalidate.
    pub table: Table,
}

/// Parse and validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let table = parse_table(&text, &path.display().to_string())?;
    Scenario::from_table(table, path)
}

pub fn parse_table(text: &str, origin: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1));
        let message = match line {
            Some(l) => format!("parse error at line {l}: {}", e.message()),
            None => format!("parse error: {}", e.message()),
        };
        CliError::Parse {
            path: origin.to_string(),
            message,
        }
    })
}

struct Loader {
    errors: Vec<String>,
    params: Vec<Param>,
    base_dir: PathBuf,
}

impl Loader {
    fn error(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn record(&mut self, path: String, value: ParamValue) {
        self.params.push(Param { path, value });
    }
}

struct Section<'t> {
    path: String,
    table: Option<&'t Table>,
    seen: BTreeSet<String>,
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "a string",
        Value::Integer(_) => "an integer",
        Value::Float(_) => "a float",
        Value::Boolean(_) => "a boolean",
        Value::Datetime(_) => "a datetime",
        Value::Array(_) => "an array",
        Value::Table(_) => "a table",
    }
}

impl<'t> Section<'t> {
    fn root(table: &'t Table) -> Self {
        Self {
            path: String::new(),
            table: Some(table),
            seen: BTreeSet::new(),
        }
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn present(&self, key: &str) -> bool {
        self.table.is_some_and(|t| t.contains_key(key))
    }

    fn get(&mut self, key: &str) -> Option<&'t Value> {
        self.seen.insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    /// Nested table; missing tables read as empty so defaults still apply.
    fn section(&mut self, ld: &mut Loader, key: &str) -> Section<'t> {
        let path = self.key_path(key);
        let table = match self.get(key) {
            Some(Value::Table(t)) => Some(t),
            Some(v) => {
                ld.error(format!("`{path}` must be a section, found {}", type_name(v)));
                None
            }
            None => None,
        };
        Section {
            path,
            table,
            seen: BTreeSet::new(),
        }
    }

    fn quantity_value(&self, ld: &mut Loader, key: &str, v: &Value, dim: Dimension) -> Option<f64> {
        let path = self.key_path(key);
        let parsed = match v {
            Value::String(s) => parse_quantity(s),
            Value::Integer(i) => Ok((*i as f64, Dimension::Dimensionless)),
            Value::Float(x) if x.is_finite() => Ok((*x, Dimension::Dimensionless)),
            other => Err(format!("expected a quantity, found {}", type_name(other))),
        };
        match parsed {
            Ok((x, d)) if d == dim => Some(x),
            Ok((_, Dimension::Dimensionless)) => {
                ld.error(format!("`{path}`: missing unit, expected {dim}"));
                None
            }
            Ok((_, d)) => {
                ld.error(format!("`{path}`: expected {dim}, found {d}"));
                None
            }
            Err(msg) => {
                ld.error(format!("`{path}`: {msg} (expected {dim})"));
                None
            }
        }
    }

    fn quantity(&mut self, ld: &mut Loader, key: &str, dim: Dimension, default: Option<f64>) -> Option<f64> {
        let value = match self.get(key) {
            Some(v) => self.quantity_value(ld, key, v, dim)?,
            None => match default {
                Some(d) => d,
                None => {
                    ld.error(format!("missing `{}` ({dim})", self.key_path(key)));
                    return None;
                }
            },
        };
        ld.record(self.key_path(key), ParamValue::Quantity(value, dim));
        Some(value)
    }

    fn optional_quantity(&mut self, ld: &mut Loader, key: &str, dim: Dimension) -> Option<f64> {
        if self.present(key) {
            self.quantity(ld, key, dim, None)
        } else {
            self.get(key);
            None
        }
    }

    fn positive(&mut self, ld: &mut Loader, key: &str, dim: Dimension, default: Option<f64>) -> Option<f64> {
        let v = self.quantity(ld, key, dim, default)?;
        if v > 0.0 {
            Some(v)
        } else {
            ld.error(format!("`{}` must be positive, got {v}", self.key_path(key)));
            None
        }
    }

    fn quantity_list(&mut self, ld: &mut Loader, key: &str, dim: Dimension, default: &[f64]) -> Option<Vec<f64>> {
        let values = match self.get(key) {
            None => default.to_vec(),
            Some(Value::Array(items)) => {
                let parsed: Vec<Option<f64>> = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| self.quantity_value(ld, &format!("{key}[{i}]"), v, dim))
                    .collect();
                parsed.into_iter().collect::<Option<Vec<f64>>>()?
            }
            Some(v) => {
                ld.error(format!("`{}` must be an array, found {}", self.key_path(key), type_name(v)));
                return None;
            }
        };
        if values.is_empty() {
            ld.error(format!("`{}` must not be empty", self.key_path(key)));
            return None;
        }
        ld.record(self.key_path(key), ParamValue::List(values.clone(), dim));
        Some(values)
    }

    fn integer(&mut self, ld: &mut Loader, key: &str, default: Option<i64>, min: i64) -> Option<usize> {
        let value = match self.get(key) {
            Some(Value::Integer(i)) => *i,
            Some(v) => {
                ld.error(format!("`{}` must be an integer, found {}", self.key_path(key), type_name(v)));
                return None;
            }
            None => match default {
                Some(d) => d,
                None => {
                    ld.error(format!("missing `{}` (integer)", self.key_path(key)));
                    return None;
                }
            },
        };
        if value < min {
            ld.error(format!("`{}` must be at least {min}, got {value}", self.key_path(key)));
            return None;
        }
        ld.record(self.key_path(key), ParamValue::Integer(value));
        Some(value as usize)
    }

    fn text(&mut self, ld: &mut Loader, key: &str, choices: &[&str], default: Option<&str>) -> Option<String> {
        let value = match self.get(key) {
            Some(Value::String(s)) => s.clone(),
            Some(v) => {
                ld.error(format!("`{}` must be a string, found {}", self.key_path(key), type_name(v)));
                return None;
            }
            None => match default {
                Some(d) => d.to_string(),
                None => {
                    ld.error(format!("missing `{}` (one of {})", self.key_path(key), choices.join(", ")));
                    return None;
                }
            },
        };
        if !choices.is_empty() && !choices.contains(&value.as_str()) {
            ld.error(format!(
                "`{}` = \"{value}\" is not one of {}",
                self.key_path(key),
                choices.join(", ")
            ));
            return None;
        }
        ld.record(self.key_path(key), ParamValue::Text(value.clone()));
        Some(value)
    }

    fn flag(&mut self, ld: &mut Loader, key: &str, default: bool) -> Option<bool> {
        let value = match self.get(key) {
            Some(Value::Boolean(b)) => *b,
            Some(v) => {
                ld.error(format!("`{}` must be true or false, found {}", self.key_path(key), type_name(v)));
                return None;
            }
            None => default,
        };
        ld.record(self.key_path(key), ParamValue::Flag(value));
        Some(value)
    }

    /// Report keys nobody asked for.
    fn finish(self, ld: &mut Loader) {
        if let Some(t) = self.table {
            for key in t.keys().filter(|k| !self.seen.contains(*k)) {
                ld.error(format!("unknown key `{}`", self.key_path(key)));
            }
        }
    }
}

/// Which unit the drive amplitude carries, and under which key.
#[derive(Debug, Clone, Copy, PartialEq)]
enum AmplitudeKind {
    Epsilon,
    Length,
    Acceleration,
}

impl AmplitudeKind {
    fn key(self) -> &'static str {
        match self {
            AmplitudeKind::Epsilon => "epsilon",
            _ => "amplitude",
        }
    }

    fn dimension(self) -> Dimension {
        match self {
            AmplitudeKind::Epsilon => Dimension::Dimensionless,
            AmplitudeKind::Length => Dimension::Length,
            AmplitudeKind::Acceleration => Dimension::InverseLength,
        }
    }
}

fn read_drive(ld: &mut Loader, mut s: Section<'_>, amp: AmplitudeKind) -> Option<DriveSpec> {
    if s.table.is_none() {
        ld.error(format!("missing section [{}]", s.path));
        s.finish(ld);
        return None;
    }
    let mirror = amp == AmplitudeKind::Acceleration;
    let kinds: &[&str] = if mirror {
        &["sinusoid", "windowed_sinusoid", "sampled", "constant"]
    } else {
        &["sinusoid", "windowed_sinusoid", "sampled"]
    };
    let kind = s.text(ld, "kind", kinds, None);
    let t0 = s.quantity(ld, "t0", Dimension::Length, Some(0.0));
    let (shape, amplitude, tf) = match kind.as_deref() {
        Some("sampled") => {
            let dt = s.positive(ld, "dt", Dimension::Length, None);
            let values = read_samples(ld, &mut s);
            let tf = match (t0, dt, &values) {
                (Some(t0), Some(dt), Some(v)) => Some(t0 + dt * (v.len().max(1) - 1) as f64),
                _ => None,
            };
            let shape = dt.zip(values).map(|(dt, values)| DriveShape::Sampled { dt, values });
            (shape, Some(1.0), tf)
        }
        Some(kind) => {
            let amplitude = s.quantity(ld, amp.key(), amp.dimension(), None);
            let tf = s.quantity(ld, "tf", Dimension::Length, None);
            let shape = match kind {
                "constant" => Some(DriveShape::Constant),
                "sinusoid" => s
                    .positive(ld, "omega_d", Dimension::InverseLength, None)
                    .map(|omega_d| DriveShape::Sinusoid { omega_d }),
                _ => {
                    let omega_d = s.positive(ld, "omega_d", Dimension::InverseLength, None);
                    let ramp = s.positive(ld, "ramp", Dimension::Length, None);
                    omega_d
                        .zip(ramp)
                        .map(|(omega_d, ramp)| DriveShape::WindowedSinusoid { omega_d, ramp })
                }
            };
            (shape, amplitude, tf)
        }
        None => (None, None, None),
    };
    let path = s.path.clone();
    s.finish(ld);
    let (t0, tf) = (t0?, tf?);
    if !(tf > t0) {
        ld.error(format!("[{path}]: need tf > t0, got t0 = {t0}, tf = {tf}"));
        return None;
    }
    if let Some(DriveShape::WindowedSinusoid { ramp, .. }) = shape {
        if 2.0 * ramp > tf - t0 {
            ld.error(format!("`{path}.ramp` exceeds half the window"));
            return None;
        }
    }
    Some(DriveSpec {
        shape: shape?,
        amplitude: amplitude?,
        t0,
        tf,
    })
}

/// Samples from an inline `values` array or a one-column `file` next to the scenario.
fn read_samples(ld: &mut Loader, s: &mut Section<'_>) -> Option<Vec<f64>> {
    let path = s.key_path("values");
    let inline = s.get("values");
    let file = s.get("file");
    let values = match (inline, file) {
        (Some(Value::Array(items)), None) => {
            let parsed: Option<Vec<f64>> = items
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Some(*x),
                    Value::Integer(i) => Some(*i as f64),
                    _ => None,
                })
                .collect();
            if parsed.is_none() {
                ld.error(format!("`{path}` must hold bare numbers"));
            }
            parsed?
        }
        (None, Some(Value::String(name))) => {
            let full = ld.base_dir.join(name);
            let text = match std::fs::read_to_string(&full) {
                Ok(t) => t,
                Err(e) => {
                    ld.error(format!("`{}`: cannot read {}: {e}", s.key_path("file"), full.display()));
                    return None;
                }
            };
            let mut out = Vec::new();
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                match line.parse::<f64>() {
                    Ok(v) if v.is_finite() => out.push(v),
                    _ => {
                        ld.error(format!("{}: line {}: `{line}` is not a number", full.display(), n + 1));
                        return None;
                    }
                }
            }
            ld.record(s.key_path("file"), ParamValue::Text(name.clone()));
            out
        }
        (Some(_), Some(_)) => {
            ld.error(format!("[{}]: give either `values` or `file`, not both", s.path));
            return None;
        }
        _ => {
            ld.error(format!("[{}]: sampled drives need `values` (array) or `file` (string)", s.path));
            return None;
        }
    };
    if values.len() < 5 {
        ld.error(format!("[{}]: need at least five samples, got {}", s.path, values.len()));
        return None;
    }
    ld.record(format!("{}.sample_count", s.path), ParamValue::Integer(values.len() as i64));
    Some(values)
}

impl Scenario {
    /// Validate a parsed table; `source` names the file for messages and relative paths.
    pub fn from_table(table: Table, source: &Path) -> Result<Self> {
        let mut ld = Loader {
            errors: Vec::new(),
            params: Vec::new(),
            base_dir: source.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        let mut root = Section::root(&table);

        let name = match root.get("name") {
            Some(Value::String(s)) if !s.trim().is_empty() => s.clone(),
            Some(_) => {
                ld.error("`name` must be a non-empty string".into());
                String::new()
            }
            None => source
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into()),
        };
        ld.record("name".into(), ParamValue::Text(name.clone()));
        let description = match root.get("description") {
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                ld.error("`description` must be a string".into());
                None
            }
            None => None,
        };

        for required in ["geometry", "boundary"] {
            if !root.present(required) {
                ld.error(format!("missing section [{required}]"));
            }
        }

        let mut geo = root.section(&mut ld, "geometry");
        let kind = if geo.table.is_some() {
            geo.text(&mut ld, "kind", &["semiopen", "cavity"], None)
        } else {
            None
        };
        let cavity = kind.as_deref() == Some("cavity");
        let (mass, length) = match kind.as_deref() {
            Some("semiopen") => (geo.quantity(&mut ld, "mass", Dimension::InverseLength, Some(0.0)), None),
            Some(_) => (None, geo.positive(&mut ld, "length", Dimension::Length, None)),
            None => (None, None),
        };
        if mass.is_some_and(|m| m < 0.0) {
            ld.error("`geometry.mass` must be non-negative".into());
        }
        geo.finish(&mut ld);

        let mut bnd = root.section(&mut ld, "boundary");
        let regime = if bnd.table.is_some() {
            bnd.text(&mut ld, "regime", &["robin_far", "robin_near_dirichlet", "mirror"], None)
        } else {
            None
        };
        let is_mirror = regime.as_deref() == Some("mirror");
        let compare_mirror = if is_mirror || bnd.table.is_none() {
            false
        } else {
            let default = !(cavity && regime.as_deref() == Some("robin_far"));
            bnd.flag(&mut ld, "compare_mirror", default).unwrap_or(false)
        };
        let setup = match (kind.as_deref(), regime.as_deref()) {
            (Some("semiopen"), Some(r)) => {
                let boundary = match r {
                    "robin_far" => bnd
                        .positive(&mut ld, "robin_length", Dimension::Length, None)
                        .map(|robin_length| SemiopenBoundary::Far { robin_length }),
                    "robin_near_dirichlet" => Some(SemiopenBoundary::NearDirichlet),
                    _ => Some(SemiopenBoundary::Mirror),
                };
                boundary.zip(mass).map(|(boundary, mass)| Setup::Semiopen { mass, boundary })
            }
            (Some(_), Some(r)) => {
                let boundary = match r {
                    "robin_far" => {
                        let k1 = bnd.positive(&mut ld, "kappa1", Dimension::Dimensionless, None);
                        let k2 = bnd.positive(&mut ld, "kappa2", Dimension::Dimensionless, None);
                        if compare_mirror {
                            ld.error("`boundary.compare_mirror`: no moving-mirror counterpart exists for a far-from-Dirichlet cavity".into());
                        }
                        k1.zip(k2).map(|(kappa1, kappa2)| CavityBoundary::Far { kappa1, kappa2 })
                    }
                    "robin_near_dirichlet" => Some(CavityBoundary::NearDirichlet),
                    _ => Some(CavityBoundary::Mirror),
                };
                boundary.zip(length).map(|(boundary, length)| Setup::Cavity { length, boundary })
            }
            _ => None,
        };
        bnd.finish(&mut ld);

        let amp = match (cavity, regime.as_deref()) {
            (_, Some("mirror")) => AmplitudeKind::Acceleration,
            (false, Some("robin_near_dirichlet")) => AmplitudeKind::Length,
            _ => AmplitudeKind::Epsilon,
        };
        let two_drives = cavity && !is_mirror;
        let mut drives = Vec::new();
        let mut drives_ok = true;
        let drive_keys: &[&str] = if two_drives { &["drive1", "drive2"] } else { &["drive"] };
        if kind.is_some() && regime.is_some() {
            for key in drive_keys {
                let s = root.section(&mut ld, key);
                match read_drive(&mut ld, s, amp) {
                    Some(d) => drives.push(d),
                    None => drives_ok = false,
                }
            }
        } else if !root.present("drive") && !(root.present("drive1") && root.present("drive2")) {
            ld.error("missing section [drive] ([drive1] and [drive2] for a Robin cavity)".into());
            drives_ok = false;
        } else {
            for key in ["drive", "drive1", "drive2"] {
                root.get(key);
            }
            drives_ok = false;
        }

        let mut analysis = root.section(&mut ld, "analysis");

        let mut fs = analysis.section(&mut ld, "flux");
        let flux = (|| {
            let grid_points = fs.integer(&mut ld, "grid_points", Some(400), 2);
            let kbar_max = fs.positive(&mut ld, "kbar_max", Dimension::Dimensionless, Some(2.0));
            let omega_d = fs.optional_quantity(&mut ld, "omega_d", Dimension::InverseLength);
            let (modes, truncation) = if cavity {
                (fs.integer(&mut ld, "modes", Some(10), 1), fs.integer(&mut ld, "truncation", Some(40), 1))
            } else {
                (Some(0), Some(0))
            };
            Some(FluxSettings {
                grid_points: grid_points?,
                kbar_max: kbar_max?,
                omega_d,
                modes: modes?,
                truncation: truncation?,
            })
        })();
        if flux.as_ref().is_some_and(|f| f.truncation < f.modes) {
            ld.error("`analysis.flux.truncation` must be at least `analysis.flux.modes`".into());
        }
        fs.finish(&mut ld);

        let mut ns = analysis.section(&mut ld, "negativity");
        let negativity = (|| {
            let delta_k = ns.optional_quantity(&mut ld, "delta_k", Dimension::InverseLength);
            let points = ns.integer(&mut ld, "points", Some(200), 2);
            let max_ratio = ns.positive(&mut ld, "max_ratio", Dimension::Dimensionless, Some(0.4));
            let omega_d = ns.optional_quantity(&mut ld, "omega_d", Dimension::InverseLength);
            Some(NegativitySettings {
                delta_k,
                points: points?,
                max_ratio: max_ratio?,
                omega_d,
            })
        })();
        if negativity.as_ref().is_some_and(|n| n.max_ratio >= 0.5) {
            ld.error("`analysis.negativity.max_ratio` must stay below 0.5".into());
        }
        ns.finish(&mut ld);

        let mut ss = analysis.section(&mut ld, "sudden");
        let strength = match (cavity, regime.as_deref()) {
            (_, Some("mirror")) | (_, None) => Some(SuddenStrength::None),
            (true, _) => {
                let e1 = ss.quantity(&mut ld, "eta1", Dimension::Dimensionless, Some(0.01));
                let e2 = ss.quantity(&mut ld, "eta2", Dimension::Dimensionless, Some(0.007));
                e1.zip(e2).map(|(eta1, eta2)| SuddenStrength::Cavity { eta1, eta2 })
            }
            (false, Some("robin_far")) => ss.quantity(&mut ld, "eta", Dimension::Dimensionless, Some(0.05)).map(SuddenStrength::Eta),
            (false, _) => ss.quantity(&mut ld, "b", Dimension::Length, Some(0.05)).map(SuddenStrength::B),
        };
        let sudden = (|| {
            let order = ss.integer(&mut ld, "order", Some(1), 1);
            if order.is_some_and(|o| o > 2) {
                ld.error("`analysis.sudden.order` must be 1 or 2".into());
                return None;
            }
            let (k_min, k_max, points, size) = if cavity {
                (Some(0.0), Some(0.0), Some(0), ss.integer(&mut ld, "size", Some(10), 1))
            } else {
                (
                    ss.positive(&mut ld, "k_min", Dimension::InverseLength, Some(0.1)),
                    ss.positive(&mut ld, "k_max", Dimension::InverseLength, Some(3.0)),
                    ss.integer(&mut ld, "points", Some(30), 2),
                    Some(0),
                )
            };
            Some(SuddenSettings {
                strength: strength?,
                order: order? as u8,
                k_min: k_min?,
                k_max: k_max?,
                points: points?,
                size: size?,
            })
        })();
        ss.finish(&mut ld);

        let mut ms = analysis.section(&mut ld, "modes");
        let modes = (|| {
            let (m_max, kappa, k_min, k_max, points) = if cavity {
                let boundary_kappa = match setup {
                    Some(Setup::Cavity {
                        boundary: CavityBoundary::Far { kappa1, kappa2 },
                        ..
                    }) => Some((kappa1, kappa2)),
                    _ => None,
                };
                let m_max = ms.integer(&mut ld, "m_max", Some(10), 1);
                // without a Robin length the static cavity is Dirichlet unless both are given
                let kappa = match boundary_kappa {
                    Some((d1, d2)) => {
                        let k1 = ms.positive(&mut ld, "kappa1", Dimension::Dimensionless, Some(d1));
                        let k2 = ms.positive(&mut ld, "kappa2", Dimension::Dimensionless, Some(d2));
                        k1.zip(k2).map(Some)
                    }
                    None if ms.present("kappa1") || ms.present("kappa2") => {
                        let k1 = ms.positive(&mut ld, "kappa1", Dimension::Dimensionless, None);
                        let k2 = ms.positive(&mut ld, "kappa2", Dimension::Dimensionless, None);
                        k1.zip(k2).map(Some)
                    }
                    None => Some(None),
                };
                (m_max, kappa, Some(0.0), Some(0.0), Some(0))
            } else {
                (
                    Some(0),
                    Some(None),
                    ms.positive(&mut ld, "k_min", Dimension::InverseLength, Some(0.05)),
                    ms.positive(&mut ld, "k_max", Dimension::InverseLength, Some(2.0)),
                    ms.integer(&mut ld, "points", Some(40), 2),
                )
            };
            Some(ModeSettings {
                m_max: m_max?,
                kappa: kappa?,
                k_min: k_min?,
                k_max: k_max?,
                points: points?,
            })
        })();
        ms.finish(&mut ld);

        let mut rs = analysis.section(&mut ld, "mirror");
        let mirror = (|| {
            let accelerations = rs.quantity_list(&mut ld, "accelerations", Dimension::InverseLength, &[0.04, 0.02, 0.01]);
            let k_prime = rs.quantity_list(&mut ld, "k_prime", Dimension::InverseLength, &[1.0, 2.0]);
            let k = rs.quantity_list(&mut ld, "k", Dimension::InverseLength, &[1.0, 2.0]);
            let regulator = rs.optional_quantity(&mut ld, "regulator", Dimension::InverseLength);
            let all_positive = |v: &Option<Vec<f64>>| v.as_ref().is_none_or(|v| v.iter().all(|&x| x > 0.0));
            if !(all_positive(&accelerations) && all_positive(&k_prime) && all_positive(&k)) {
                ld.error("[analysis.mirror]: accelerations and wavenumbers must be positive".into());
                return None;
            }
            Some(MirrorSettings {
                accelerations: accelerations?,
                k_prime: k_prime?,
                k: k?,
                regulator,
            })
        })();
        rs.finish(&mut ld);

        let mut is = analysis.section(&mut ld, "identities");
        let identities = (|| {
            let grid = is.quantity_list(&mut ld, "grid", Dimension::InverseLength, &[0.3, 0.7, 1.1, 1.9]);
            let size = is.integer(&mut ld, "size", Some(20), 2);
            let quadratic_size = is.integer(&mut ld, "quadratic_size", Some(40), 2);
            let td = is.positive(&mut ld, "tolerance_discrete", Dimension::Dimensionless, Some(1e-10));
            let tc = is.positive(&mut ld, "tolerance_continuum", Dimension::Dimensionless, Some(1e-9));
            let tq = is.positive(&mut ld, "tolerance_quadratic", Dimension::Dimensionless, Some(1e-6));
            if grid.as_ref().is_some_and(|g| g.iter().any(|&k| k <= 0.0)) {
                ld.error("`analysis.identities.grid` must hold positive wavenumbers".into());
                return None;
            }
            Some(IdentitySettings {
                grid: grid?,
                size: size?,
                quadratic_size: quadratic_size?,
                tolerance_discrete: td?,
                tolerance_continuum: tc?,
                tolerance_quadratic: tq?,
            })
        })();
        is.finish(&mut ld);
        analysis.finish(&mut ld);

        let mut nu = root.section(&mut ld, "numerics");
        let numerics = (|| {
            let tolerance_scale = nu.positive(&mut ld, "tolerance_scale", Dimension::Dimensionless, Some(1.0));
            let rel_tol = nu.positive(&mut ld, "rel_tol", Dimension::Dimensionless, Some(1e-8));
            let convergence_tol = nu.positive(&mut ld, "convergence_tol", Dimension::Dimensionless, Some(1e-3));
            let max_doublings = nu.integer(&mut ld, "max_doublings", Some(12), 0);
            let k_max = nu.optional_quantity(&mut ld, "k_max", Dimension::InverseLength);
            Some(Numerics {
                tolerance_scale: tolerance_scale?,
                rel_tol: rel_tol?,
                convergence_tol: convergence_tol?,
                max_doublings: max_doublings?,
                k_max,
            })
        })();
        nu.finish(&mut ld);
        root.finish(&mut ld);

        let source_name = source.display().to_string();
        let assembled = (|| {
            Some(Scenario {
                name,
                description,
                source: source.to_path_buf(),
                setup: setup?,
                compare_mirror,
                drives,
                flux: flux?,
                negativity: negativity?,
                sudden: sudden?,
                modes: modes?,
                mirror: mirror?,
                identities: identities?,
                numerics: numerics?,
                parameters: Vec::new(),
                table: table.clone(),
            })
        })();
        match assembled {
            Some(mut s) if ld.errors.is_empty() && drives_ok => {
                s.parameters = ld.params;
                Ok(s)
            }
            _ => {
                if ld.errors.is_empty() {
                    ld.errors.push("incomplete scenario".into());
                }
                Err(CliError::Invalid {
                    path: source_name,
                    errors: ld.errors,
                })
            }
        }
    }

    pub fn is_cavity(&self) -> bool {
        matches!(self.setup, Setup::Cavity { .. })
    }

    /// Drive frequency used as the reference for `k̄` and the negativity scan.
    pub fn flux_omega_d(&self) -> Option<f64> {
        self.flux.omega_d.or_else(|| self.drives.first().and_then(DriveSpec::omega_d))
    }

    pub fn negativity_omega_d(&self) -> Option<f64> {
        self.negativity.omega_d.or_else(|| self.drives.first().and_then(DriveSpec::omega_d))
    }

    pub fn parameter(&self, path: &str) -> Option<&ParamValue> {
        self.parameters.iter().find(|p| p.path == path).map(|p| &p.value)
    }
}

/// Continuum kernels for the half-line: the Robin side (if any) and the mirror side (if any).
pub struct SemiopenKernels {
    pub robin: Option<Box<dyn ContinuumKernel>>,
    pub mirror: Option<MovingMirrorKernel>,
    pub warnings: Vec<String>,
}

pub struct CavityKernels {
    pub robin: Option<Box<dyn DiscreteKernel>>,
    pub mirror: Option<RigidCavityMirrorKernel>,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn semiopen_kernels(&self) -> robin_dce::Result<Option<SemiopenKernels>> {
        let Setup::Semiopen { mass, boundary } = self.setup else {
            return Ok(None);
        };
        let drive = self.drives[0].profile()?;
        let mut warnings = Vec::new();
        let (robin, matched): (Option<Box<dyn ContinuumKernel>>, Option<AccelerationProfile>) = match boundary {
            SemiopenBoundary::Far { robin_length } => {
                let matched = if self.compare_mirror {
                    Some(AccelerationProfile::matching_semiopen_far(&drive, robin_length)?)
                } else {
                    None
                };
                (Some(Box::new(SemiopenFarKernel::new(robin_length, mass, drive)?)), matched)
            }
            SemiopenBoundary::NearDirichlet => {
                let matched = if self.compare_mirror {
                    Some(AccelerationProfile::matching_near_dirichlet(&drive)?)
                } else {
                    None
                };
                (Some(Box::new(SemiopenNearDirichletKernel::new(mass, drive)?)), matched)
            }
            SemiopenBoundary::Mirror => (None, Some(self.drives[0].acceleration()?)),
        };
        if matched.is_some() && mass > 0.0 {
            warnings.push("the moving-mirror kernel is massless; the mirror side ignores geometry.mass".into());
        }
        let mirror = matched.map(|accel| MovingMirrorKernel { accel });
        if let Some(w) = mirror.as_ref().and_then(MovingMirrorKernel::warning) {
            warnings.push(w.to_string());
        }
        Ok(Some(SemiopenKernels { robin, mirror, warnings }))
    }

    /// Cavity kernels; the far-from-Dirichlet table holds `truncation` roots.
    pub fn cavity_kernels(&self, truncation: usize) -> robin_dce::Result<Option<CavityKernels>> {
        let Setup::Cavity { length, boundary } = self.setup else {
            return Ok(None);
        };
        let mut warnings = Vec::new();
        let kernels = match boundary {
            CavityBoundary::Far { kappa1, kappa2 } => {
                let table = cavity_eigenvalues(kappa1, kappa2, truncation)?.with_length(length)?;
                let robin: Box<dyn DiscreteKernel> = Box::new(CavityFarKernel {
                    table,
                    eta1: self.drives[0].profile()?,
                    eta2: self.drives[1].profile()?,
                });
                CavityKernels {
                    robin: Some(robin),
                    mirror: None,
                    warnings,
                }
            }
            CavityBoundary::NearDirichlet => {
                let eta1 = self.drives[0].profile()?;
                let mirror = if !self.compare_mirror {
                    None
                } else if self.drives[0] == self.drives[1] {
                    Some(RigidCavityMirrorKernel {
                        length,
                        accel: AccelerationProfile::matching_rigid_cavity(&eta1, length)?,
                    })
                } else {
                    warnings.push("a rigid mirror matches only identical end drives; mirror side skipped".into());
                    None
                };
                let robin: Box<dyn DiscreteKernel> = Box::new(CavityNearDirichletKernel {
                    length,
                    eta1,
                    eta2: self.drives[1].profile()?,
                });
                CavityKernels {
                    robin: Some(robin),
                    mirror,
                    warnings,
                }
            }
            CavityBoundary::Mirror => CavityKernels {
                robin: None,
                mirror: Some(RigidCavityMirrorKernel {
                    length,
                    accel: self.drives[0].acceleration()?,
                }),
                warnings,
            },
        };
        let mut kernels = kernels;
        if let Some(w) = kernels.mirror.as_ref().and_then(|m| m.accel.validity_warning()) {
            kernels.warnings.push(w.to_string());
        }
        Ok(Some(kernels))
    }
}

/// Replace the scalar at a dotted `path`, keeping the unit already written there
/// unless `value` brings its own.
pub fn substitute(table: &mut Table, path: &str, value: &str) -> std::result::Result<(), String> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().filter(|l| !l.is_empty()).ok_or_else(|| format!("empty axis `{path}`"))?;
    let mut cursor = table;
    for part in parts {
        cursor = match cursor.get_mut(part) {
            Some(Value::Table(t)) => t,
            _ => return Err(format!("axis `{path}`: no section `{part}`")),
        };
    }
    let slot = cursor
        .get_mut(leaf)
        .ok_or_else(|| format!("axis `{path}` does not name a parameter in the scenario"))?;
    let value = value.trim();
    let replacement = match slot {
        Value::String(old) => {
            let (_, new_dim) = parse_quantity(value).map_err(|e| format!("axis `{path}`: {e}"))?;
            let (_, old_dim) = parse_quantity(old).map_err(|_| format!("axis `{path}` is not a numeric quantity"))?;
            if new_dim == Dimension::Dimensionless && old_dim != Dimension::Dimensionless {
                Value::String(format!("{value} {}", old_dim.symbol()))
            } else {
                Value::String(value.to_string())
            }
        }
        Value::Float(_) => Value::Float(value.parse().map_err(|_| format!("axis `{path}`: `{value}` is not a number"))?),
        Value::Integer(_) => Value::Integer(value.parse().map_err(|_| format!("axis `{path}`: `{value}` is not an integer"))?),
        _ => return Err(format!("axis `{path}` is not a scalar parameter")),
    };
    *slot = replacement;
    Ok(())
}
