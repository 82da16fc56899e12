use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use robin_dce_cli::commands::{run, Command, RunOptions};
use robin_dce_cli::sweep::sweep;
use robin_dce_cli::units::{parse_quantity, Dimension};
use robin_dce_cli::{load_scenario, CliError, Status};

/// Bogoliubov coefficients, photon flux and negativity for time-dependent
/// Robin boundaries and moving mirrors.
#[derive(Parser)]
#[command(name = "robin-dce", version)]
struct Cli {
    /// Output directory for CSV artifacts and manifests.
    #[arg(long, global = true, env = "ROBIN_DCE_OUT", default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Multiply every numerical tolerance by this factor.
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,

    /// Initial inner cutoff for flux integrals, e.g. "50 /mm".
    #[arg(long, global = true, value_parser = parse_wavenumber)]
    k_max_override: Option<f64>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario file.
    scenario: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Robin and mirror photon flux densities.
    Flux(ScenarioArg),
    /// |B| and negativity along the resonant wavepacket scan.
    Negativity(ScenarioArg),
    /// Sudden-change Bogoliubov coefficients.
    Sudden(ScenarioArg),
    /// Static mode table.
    Modes(ScenarioArg),
    /// Uniformly accelerated mirror: exact integrals against the small-a expansion.
    MirrorExact(ScenarioArg),
    /// Bogoliubov identity checks.
    VerifyIdentities(ScenarioArg),
    /// Rerun a command over several values of one scenario parameter.
    Sweep {
        scenario: PathBuf,
        /// Dotted parameter path, e.g. boundary.robin_length.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; bare numbers keep the unit already in the file.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        /// Command to run for each value.
        #[arg(long, default_value = "flux", value_parser = parse_command)]
        command: Command,
    },
    /// Validate a scenario and list its resolved parameters.
    Check(ScenarioArg),
}

fn parse_wavenumber(s: &str) -> Result<f64, String> {
    match parse_quantity(s)? {
        (k, Dimension::InverseLength | Dimension::Dimensionless) if k > 0.0 => Ok(k),
        (_, Dimension::Length) => Err("expected a wavenumber in /mm".into()),
        (k, _) => Err(format!("must be positive, got {k}")),
    }
}

fn parse_command(s: &str) -> Result<Command, String> {
    s.parse()
}

fn report_status(status: Status) -> ExitCode {
    match status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Failed | Status::Error => ExitCode::from(2),
    }
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    let opts = RunOptions {
        threads: cli.threads,
        tolerance_scale: cli.tolerance_scale,
        k_max_override: cli.k_max_override,
    };
    let (command, path) = match cli.command {
        Cmd::Flux(a) => (Command::Flux, a.scenario),
        Cmd::Negativity(a) => (Command::Negativity, a.scenario),
        Cmd::Sudden(a) => (Command::Sudden, a.scenario),
        Cmd::Modes(a) => (Command::Modes, a.scenario),
        Cmd::MirrorExact(a) => (Command::MirrorExact, a.scenario),
        Cmd::VerifyIdentities(a) => (Command::VerifyIdentities, a.scenario),
        Cmd::Check(a) => {
            let s = load_scenario(&a.scenario)?;
            for p in &s.parameters {
                println!("{} = {}", p.path, p.value);
            }
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Sweep {
            scenario,
            axis,
            values,
            command,
        } => {
            let s = load_scenario(&scenario)?;
            let outcome = sweep(&s, command, &axis, &values, &cli.out, &opts)?;
            for r in &outcome.rows {
                match &r.diagnostic {
                    Some(d) => println!("{axis} = {}: {} ({d})", r.value, r.status),
                    None => println!("{axis} = {}: {}", r.value, r.status),
                }
            }
            println!("wrote {}", outcome.summary_csv.display());
            return Ok(if outcome.all_ok() { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
    };
    let scenario = load_scenario(&path)?;
    let outcome = run(&scenario, command, &cli.out, &opts)?;
    if let Some(csv) = &outcome.csv {
        println!("wrote {}", csv.display());
    }
    println!("wrote {}", outcome.manifest.display());
    if let Some(d) = &outcome.diagnostic {
        eprintln!("{}: {d}", command.name());
    }
    Ok(report_status(outcome.status))
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
