//! Command-line front end: scenario config, subcommands and output handling.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod analyze;
pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod simulate;
pub mod synth;

pub use config::{ScenarioConfig, TopologySelection};
pub use error::CliError;

/// Residential nanogrid simulator and heat-pump test-data analysis.
#[derive(Debug, Parser)]
#[command(name = "nanogrid", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispatch and bill one or all topologies; writes <out>/<topology>/{flows,bills}.csv.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// all, ac_baseline, dc_retrofit or dc_ideal.
        #[arg(long)]
        topology: Option<TopologySelection>,
        /// Use a generated scenario instead of the configured input files.
        #[arg(long)]
        synth: bool,
        /// Generator seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Length of the generated scenario in days.
        #[arg(long)]
        days: Option<u32>,
    },
    /// Reduce lab and field measurements; writes <out>/report.csv.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Steady-state lab records, overriding the config.
        #[arg(long, value_name = "FILE")]
        lab: Option<PathBuf>,
        /// Hourly field samples, overriding the config.
        #[arg(long, value_name = "FILE")]
        field: Option<PathBuf>,
    },
    /// Compare the totals of two bills.csv files covering the same months.
    Compare {
        /// Reference bills.
        baseline: PathBuf,
        /// Bills to compare against the reference.
        variant: PathBuf,
    },
    /// Write a synthetic scenario (loads, PV, field samples and a config).
    Synth {
        #[command(flatten)]
        common: Common,
        /// Generator seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Length of the generated scenario in days.
        #[arg(long)]
        days: Option<u32>,
    },
}

fn load_config(common: &Common) -> Result<ScenarioConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => {
            log::info!("config {}", path.display());
            ScenarioConfig::load(path)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    Ok(config)
}

/// Executes one parsed invocation, writing the human-readable summary to
/// `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            common,
            topology,
            synth,
            seed,
            days,
        } => {
            let mut config = load_config(&common)?;
            if let Some(t) = topology {
                config.topology = t;
            }
            config.seed = seed.unwrap_or(config.seed);
            config.days = days.unwrap_or(config.days);
            simulate::cmd_simulate(&config, synth, stdout)
        }
        Command::Analyze { common, lab, field } => {
            let mut config = load_config(&common)?;
            if lab.is_some() {
                config.inputs.lab = lab;
            }
            if field.is_some() {
                config.inputs.field = field;
            }
            analyze::cmd_analyze(&config, stdout)
        }
        Command::Compare { baseline, variant } => compare::cmd_compare(&baseline, &variant, stdout),
        Command::Synth { common, seed, days } => {
            let mut config = load_config(&common)?;
            config.seed = seed.unwrap_or(config.seed);
            config.days = days.unwrap_or(config.days);
            synth::cmd_synth(&config, stdout)
        }
    }
}
