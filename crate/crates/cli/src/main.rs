//! `tares`: precompute, rank, benchmark and play the five-letter word game.

mod assist;
mod commands;
mod load;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tares_core::ScoreMode;

/// Exit status 2: bad flags, missing or mismatched inputs.
pub const EXIT_USAGE: u8 = 2;
/// Exit status 1: anything that went wrong after the inputs were accepted.
pub const EXIT_RUNTIME: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn usage(error: impl Into<anyhow::Error>) -> CliError {
        CliError {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> CliError {
        CliError {
            code: EXIT_RUNTIME,
            error: error.into(),
        }
    }
}

pub type CliResult = Result<(), CliError>;

#[derive(Parser, Debug)]
#[command(name = "tares", version, about = "Solver workbench for the five-letter word-guessing game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the guess x answer color-code cache.
    Precompute(PrecomputeArgs),
    /// Rank opening guesses.
    Openers(OpenersArgs),
    /// Play every answer and report the round distribution.
    Simulate(SimulateArgs),
    /// Play one game against a known answer.
    Play(PlayArgs),
    /// Interactive assistant for a live game (reads `word code` lines from stdin).
    Assist(AssistArgs),
    /// Serve the HTTP session API.
    Serve(ServeArgs),
}

fn parse_p(s: &str) -> Result<ScoreMode, String> {
    s.parse::<ScoreMode>().map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct PrecomputeArgs {
    /// Guess list, one word per line.
    #[arg(long)]
    pub words: PathBuf,
    /// Answer list; defaults to the guess list.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub length: usize,
}

#[derive(Args, Debug, Clone)]
pub struct PolicyArgs {
    /// Scoring exponent: a nonzero number, `inf` or `-inf`.
    #[arg(long, value_parser = parse_p, allow_hyphen_values = true)]
    pub p: Option<ScoreMode>,
    /// Use the FDS-adjusted score.
    #[arg(long)]
    pub fds: bool,
}

#[derive(Args, Debug)]
pub struct OpenersArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Also list the two worst openers.
    #[arg(long)]
    pub worst: bool,
    #[arg(long)]
    pub hard: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub hard: bool,
    /// Only play the answers listed in this file.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    /// Answer weights, lines of `word weight`.
    #[arg(long)]
    pub prior: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub answer: String,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub hard: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct AssistArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub hard: bool,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Directory of static UI files served outside `/api/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Precompute(a) => commands::precompute(&a),
        Command::Openers(a) => commands::openers(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Play(a) => commands::play(&a),
        Command::Assist(a) => assist::run(&a),
        Command::Serve(a) => commands::serve(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
