//! `noisytele`: fidelity, deviation, verification and cost reports for
//! teleportation over noisy classical channels.

mod commands;
mod fmt;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noisytele::telefid::ChannelConstraint;
use noisytele::{Channel, Error, TwoQubitState};

use commands::{Model, Outcome};
use input::{channel_from, parse_document, parse_fix, parse_probabilities, parse_tie, StateDocument, StrategyChoice};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Failure(_) => commands::EXIT_FAILURE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "noisytele", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// Model I error-pattern probabilities p0,p1,p2,p3.
    #[arg(long, value_parser = parse_probabilities, allow_hyphen_values = true, conflicts_with_all = ["eta", "eta_prime"])]
    p: Option<[f64; 4]>,
    /// Model II: probability the first bit arrives intact.
    #[arg(long, requires = "eta_prime")]
    eta: Option<f64>,
    /// Model II: probability the second bit arrives intact.
    #[arg(long = "eta-prime", requires = "eta")]
    eta_prime: Option<f64>,
}

impl ChannelArgs {
    fn channel(&self) -> Result<Channel, CliError> {
        channel_from(self.p, self.eta, self.eta_prime)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical form, fidelity, deviation and conditions for one state and channel.
    Analyze {
        state: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Evaluate F and Delta over a one-parameter grid and write CSV.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the closed forms with direct simulation.
    Verify {
        state: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StrategyChoice::Standard)]
        strategy: StrategyChoice,
    },
    /// Minimum mutual information compatible with non-classical fidelity.
    OptimizeCost {
        state: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
    },
    /// Solve for a Model I channel with zero fidelity deviation.
    FindChannel {
        state: PathBuf,
        /// Fix one probability, e.g. p1=0.15.
        #[arg(long, value_parser = parse_fix)]
        fix: Vec<ChannelConstraint>,
        /// Tie two probabilities, e.g. p1=p2.
        #[arg(long, value_parser = parse_tie)]
        tie: Vec<ChannelConstraint>,
    },
}

fn load_state(path: &std::path::Path) -> Result<TwoQubitState, CliError> {
    parse_document::<StateDocument>(path)?.state.state()
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { state, channel } => Ok(commands::analyze(&load_state(&state)?, &channel.channel()?)),
        Command::Sweep { spec, out } => commands::sweep(&parse_document(&spec)?, &out),
        Command::Verify {
            state,
            channel,
            samples,
            seed,
            strategy,
        } => commands::verify(&load_state(&state)?, &channel.channel()?, strategy, samples, seed),
        Command::OptimizeCost { state, model } => commands::optimize_cost(&load_state(&state)?, model),
        Command::FindChannel { state, fix, tie } => {
            let constraints: Vec<_> = fix.into_iter().chain(tie).collect();
            commands::find_channel(&load_state(&state)?, &constraints)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
