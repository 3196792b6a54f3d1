//! `deduce`: run logic programs, certify gold answers, generate problems
//! and evaluate program-synthesis providers.
//!
//! Exit codes: 0 success, 1 no solution, 2 any error (usage included).
//! Provider tokens are read from the environment only.

mod config;
mod eval;
mod oracle;
mod run;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;

/// Ordered by severity so the worst of several outcomes is the max.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    NoSolution = 1,
    Error = 2,
}

/// Both variants exit with status 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Failed(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "deduce",
    version,
    about = "Logic programs with constraint solving, plus an evaluation harness"
)]
struct Cli {
    /// TOML file with policy, budget, engine, live and eval settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Repeat for more log output (also honours RUST_LOG).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Consult a program and answer a query.
    Run(run::RunArgs),
    /// Evaluate a provider over a problem set.
    Eval(eval::EvalArgs),
    /// Generate navigate problems with oracle golds.
    GenNavigate(eval::GenArgs),
    /// Run an independent oracle.
    #[command(subcommand)]
    Oracle(oracle::OracleCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = FileConfig::load(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Run(args) => run::cmd_run(args, &cfg),
        Command::Eval(args) => eval::cmd_eval(args, &cfg),
        Command::GenNavigate(args) => eval::cmd_gen_navigate(args),
        Command::Oracle(cmd) => oracle::cmd_oracle(cmd),
    });
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Exit::Error as u8)
        }
    }
}
