//! Scenario runner for the robin-dce library: scenario files, commands,
//! sweeps and deterministic CSV output.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;
pub mod sweep;
pub mod units;

pub use commands::{compute, run, Command, RunOptions, RunOutcome};
pub use error::{CliError, Result};
pub use output::Status;
pub use scenario::{load_scenario, Scenario};
