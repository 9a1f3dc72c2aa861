use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pwm_lab_cli::commands::{self, CompareArgs, OptimizeArgs, Outcome, SweepArgs};
use pwm_lab_cli::config::{load_config, Settings};

/// Synthesize and analyze PWM inverter waveforms.
#[derive(Debug, Parser)]
#[command(name = "pwm-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the three-phase waveform, carrier and modulator to waveform.csv
    Synth(Run<NoArgs>),
    /// Write the line-to-line spectrum and a distortion report
    Spectrum(Run<NoArgs>),
    /// Analyze the truncated-carrier strategy over a list of K values
    Sweep(Run<SweepArgs>),
    /// Search K for minimum THD, DF or motor sensitivity
    Optimize(Run<OptimizeArgs>),
    /// Tabulate distortion reports for several strategies
    Compare(Run<CompareArgs>),
}

#[derive(Debug, Clone, clap::Args)]
struct NoArgs {}

#[derive(Debug, clap::Args)]
struct Run<A: clap::Args> {
    /// Flat `key = value` file; flags take precedence
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
    #[command(flatten)]
    args: A,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let (config, settings) = match &cli.command {
        Command::Synth(r) | Command::Spectrum(r) => (&r.config, &r.settings),
        Command::Sweep(r) => (&r.config, &r.settings),
        Command::Optimize(r) => (&r.config, &r.settings),
        Command::Compare(r) => (&r.config, &r.settings),
    };
    let cfg = match load_config(config.as_deref(), settings.clone()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("pwm-lab: cli-io: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let result: anyhow::Result<Outcome> = match &cli.command {
        Command::Synth(_) => commands::synth(&cfg),
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Sweep(r) => commands::sweep(&cfg, &r.args),
        Command::Optimize(r) => commands::optimize(&cfg, &r.args),
        Command::Compare(r) => commands::compare(&cfg, &r.args),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                log::info!("wrote {}", f.display());
            }
            if outcome.partial {
                ExitCode::from(EXIT_PARTIAL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("pwm-lab: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
