use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oilsec_core::config::{RunConfig, Scenario};
use oilsec_core::run::{dry_run, exit_code, run, OutputFormat, EXIT_CONFIG};

/// Security analysis of optical-injection locking in twin-field QKD.
#[derive(Debug, Parser)]
#[command(name = "oilsec", version)]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic stage; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path; a `.meta.json` sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Yields, phase-error bound and key rate over the distance sweep.
    Keyrate,
    /// Optimal sending probability and signal intensity per distance.
    Optimize,
    /// Expected, aware and oblivious key rates under intensity enhancement.
    AttackSweep,
    /// Watchdog readings for reference-intensity modulation.
    Modulation,
    /// Optical spectrum of the modulated locked laser.
    Spectrum,
    /// Isolation budget at the configured wavelengths.
    Budget,
    /// Check a configuration without running it.
    Validate {
        #[arg(long, value_enum)]
        scenario: Option<Scenario>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        None => RunConfig::default(),
    };

    let scenario = match cli.command {
        Command::Keyrate => Scenario::Keyrate,
        Command::Optimize => Scenario::Optimize,
        Command::AttackSweep => Scenario::AttackSweep,
        Command::Modulation => Scenario::Modulation,
        Command::Spectrum => Scenario::Spectrum,
        Command::Budget => Scenario::Budget,
        Command::Validate { scenario } => {
            let problems = dry_run(&cfg, scenario);
            if problems.is_empty() {
                println!("ok");
                return ExitCode::SUCCESS;
            }
            for p in &problems {
                eprintln!("invalid: {p}");
            }
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };

    match run(&cfg, scenario, cli.seed, cli.out.as_deref(), cli.format) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
