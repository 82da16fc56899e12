//! Parameter sweeps: rerun one command with a single scenario value replaced.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::commands::{run, with_threads, Command, RunOptions, Summary};
use crate::error::{CliError, Result};
use crate::output::{header_lines, write_file, Cell, CsvTable};
use crate::scenario::{substitute, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    /// `ok`, `failed`, `error`, or `invalid` when the substituted scenario did not validate.
    pub status: String,
    pub diagnostic: Option<String>,
    pub summary: Summary,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub summary_csv: PathBuf,
}

impl SweepOutcome {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status == "ok")
    }
}

fn directory_name(axis: &str, value: &str) -> String {
    let clean: String = value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+') { c } else { '_' })
        .collect();
    format!("{axis}={clean}")
}

/// Run `command` once per value of `axis`; each run writes into its own
/// subdirectory of `out_dir`, and a summary CSV lists them in input order.
/// Failing values are recorded and the sweep carries on.
pub fn sweep(
    scenario: &Scenario,
    command: Command,
    axis: &str,
    values: &[String],
    out_dir: &Path,
    opts: &RunOptions,
) -> Result<SweepOutcome> {
    if values.is_empty() {
        return Err(CliError::Sweep("empty value list".into()));
    }
    let mut probe = scenario.table.clone();
    substitute(&mut probe, axis, &values[0]).map_err(CliError::Sweep)?;

    let inner = RunOptions {
        threads: None,
        ..opts.clone()
    };
    let rows: Vec<SweepRow> = with_threads(opts.threads, || {
        values
            .par_iter()
            .map(|value| run_one(scenario, command, axis, value, out_dir, &inner))
            .collect()
    })?;

    let mut table = CsvTable::new(&[
        "value",
        "status",
        "n_robin",
        "n_mirror",
        "mirror_to_robin",
        "peak_n_robin",
        "peak_n_mirror",
        "peak_bhat_robin",
        "peak_bhat_mirror",
        "diagnostic",
    ]);
    for r in &rows {
        let s = &r.summary;
        let ratio = s.n_robin.zip(s.n_mirror).map(|(r, m)| m / r);
        table.push(vec![
            Cell::Text(r.value.clone()),
            Cell::Text(r.status.clone()),
            Cell::opt(s.n_robin),
            Cell::opt(s.n_mirror),
            Cell::opt(ratio),
            Cell::opt(s.peak_n_robin),
            Cell::opt(s.peak_n_mirror),
            Cell::opt(s.peak_bhat_robin),
            Cell::opt(s.peak_bhat_mirror),
            r.diagnostic.as_deref().map_or(Cell::Empty, |d| Cell::Text(d.to_string())),
        ]);
    }
    let mut header = header_lines(scenario, &format!("sweep {}", command.name()), &[]);
    header.insert(2, format!("sweep.axis = {axis}"));
    header.insert(3, format!("sweep.values = [{}]", values.join(", ")));
    let summary_csv = out_dir.join(format!("{}.sweep.{}.csv", scenario.name, command.name()));
    write_file(&summary_csv, &table.render(&header)?)?;
    Ok(SweepOutcome { rows, summary_csv })
}

fn run_one(scenario: &Scenario, command: Command, axis: &str, value: &str, out_dir: &Path, opts: &RunOptions) -> SweepRow {
    let row = |status: &str, diagnostic: Option<String>, summary: Summary| SweepRow {
        value: value.to_string(),
        status: status.to_string(),
        diagnostic,
        summary,
    };
    let mut table = scenario.table.clone();
    if let Err(e) = substitute(&mut table, axis, value) {
        return row("invalid", Some(e), Summary::default());
    }
    let variant = match Scenario::from_table(table, &scenario.source) {
        Ok(s) => s,
        Err(e) => return row("invalid", Some(e.to_string()), Summary::default()),
    };
    match run(&variant, command, &out_dir.join(directory_name(axis, value)), opts) {
        Ok(outcome) => {
            let status = serde_json::to_value(outcome.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            row(&status, outcome.diagnostic, outcome.summary)
        }
        Err(e) => row("error", Some(e.to_string()), Summary::default()),
    }
}
