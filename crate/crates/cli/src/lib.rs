//! Experiment runner behind the `fda-secrecy` binary.
//!
//! [`config`] turns a flat key/value file into validated [`config::Settings`],
//! [`experiments`] computes the output tables, and [`output`] serializes them.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use error::{CliError, CliResult};

/// Runs `experiment` with the config at `config_path` and writes the CSV,
/// any sibling tables and the `.meta` sidecar next to `out`.
pub fn execute(experiment: config::Experiment, config_path: &Path, out: &Path, seed: Option<u64>) -> CliResult<()> {
    let bytes = std::fs::read(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Config("config is not valid UTF-8".into()))?;
    let settings = config::Settings::from_text(experiment, text, seed)?;
    let result = experiments::run(&settings)?;
    result.main.write(out)?;
    for (suffix, table) in &result.extra {
        table.write(&output::sibling_csv(out, suffix))?;
    }
    output::write_meta(out, &bytes, settings.seed, experiment.name())
}
