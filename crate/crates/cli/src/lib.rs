//! Library side of the `extremal-qudit` binary: configuration, the five
//! commands and their serialized outputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod records;

use std::path::Path;

pub use config::{Command, Format, RunConfig};
pub use error::{CliError, CliResult};

/// Bytes to write plus an error to report after writing them.
pub struct Artifact {
    pub bytes: Vec<u8>,
    pub failure: Option<CliError>,
}

impl Artifact {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, failure: None }
    }
}

fn json_only(command: Command, format: Format) -> CliResult<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::config(format!("`{command}` only writes JSON"))),
    }
}

/// Runs a validated configuration and renders the result.
pub fn render(command: Command, config: &RunConfig, format: Format, seed: u64) -> CliResult<Artifact> {
    config.validate(command)?;
    match command {
        Command::Analyze => {
            json_only(command, format)?;
            Ok(Artifact::ok(output::json(&commands::analyze::analyze(config, seed)?)?))
        }
        Command::Sweep => {
            let table = commands::sweep::sweep(config, seed)?;
            Ok(Artifact::ok(match format {
                Format::Csv => commands::sweep::to_csv(&table)?,
                Format::Json => output::json(&commands::sweep::report(config, &table))?,
            }))
        }
        Command::Region => {
            let points = commands::region::region(config)?;
            Ok(Artifact::ok(match format {
                Format::Csv => commands::region::to_csv(&points)?,
                Format::Json => {
                    let records: Vec<_> = points.iter().map(commands::region::RegionRecord::from).collect();
                    output::json(&records)?
                }
            }))
        }
        Command::Classify => {
            json_only(command, format)?;
            Ok(Artifact::ok(output::json(&commands::classify::classify_command(config)?)?))
        }
        Command::Verify => {
            json_only(command, format)?;
            let summary = commands::verify::verify(config, seed)?;
            let failure = (!summary.passed).then(|| CliError::Verification(summary.failures().join(", ")));
            Ok(Artifact { bytes: output::json(&summary)?, failure })
        }
    }
}

/// Loads `config_path`, runs `command` and writes the output. `out` and
/// `seed` override the configuration.
pub fn run(command: Command, config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> CliResult<()> {
    let config = RunConfig::load(config_path)?;
    let path = out.or(config.output_path());
    let format = config.format(command, path);
    let seed = seed.or(config.seed).unwrap_or(0);
    let artifact = render(command, &config, format, seed)?;
    output::emit(&artifact.bytes, path)?;
    artifact.failure.map_or(Ok(()), Err)
}
