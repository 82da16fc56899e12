#![allow(dead_code)]

use std::path::{Path, PathBuf};

use robin_dce_cli::{load_scenario, Scenario};

pub const BUNDLED: [&str; 6] = ["fig1_left", "fig1_right", "fig2_left", "fig2_right", "cavity_demo", "identities"];

pub fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn bundled_path(name: &str) -> PathBuf {
    scenario_dir().join(format!("{name}.scenario"))
}

pub fn bundled(name: &str) -> Scenario {
    load_scenario(&bundled_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Write `text` to a scenario file in `dir` and return its path.
pub fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(format!("{name}.scenario"));
    std::fs::write(&path, text).unwrap();
    path
}

/// Data rows of a CSV artifact as (columns, rows), skipping `#` comments.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (columns, rows)
}

pub fn column(columns: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

pub const SMALL_FLUX: &str = r#"
name = "small"

[geometry]
kind = "semiopen"

[boundary]
regime = "robin_far"
robin_length = "0.44 mm"

[drive]
kind = "sinusoid"
epsilon = 0.25
omega_d = "0.155 /mm"
tf = "40.5 mm"

[analysis.flux]
grid_points = 60

[analysis.negativity]
points = 20
"#;

/// Near-Dirichlet drive that is still on at the window end, so the flux
/// cutoff never settles within three doublings.
#[allow(dead_code)]
pub fn divergent_flux() -> String {
    SMALL_FLUX
        .replace("regime = \"robin_far\"\nrobin_length = \"0.44 mm\"", "regime = \"robin_near_dirichlet\"")
        .replace("epsilon = 0.25", "amplitude = \"0.1 mm\"")
        .replace("\"40.5 mm\"", "\"30 mm\"")
        .replace("[analysis.flux]", "[numerics]\nmax_doublings = 3\n\n[analysis.flux]")
}
