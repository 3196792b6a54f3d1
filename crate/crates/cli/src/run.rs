//! `deduce run`: consult a file and print the answers to a query.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::Args;
use deduce_core::{consult, parse_program, Budget, EngineError, Machine, SyntaxError};

use crate::config::{parse_label_strategy, FileConfig};
use crate::{CliError, Exit};

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Program to consult.
    pub file: PathBuf,
    /// Query to solve. Without it, queries are read from stdin, one per line.
    #[arg(short, long)]
    pub query: Option<String>,
    /// Stop after this many answers.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// `leftmost` or `first-fail`, optionally suffixed `:up` or `:down`.
    #[arg(long)]
    pub label_strategy: Option<String>,
    #[arg(long)]
    pub occurs_check: bool,
}

fn syntax_detail(e: &SyntaxError) -> String {
    match e {
        SyntaxError::Lex { message, .. } | SyntaxError::OperatorClash { message, .. } => message.clone(),
        SyntaxError::Parse { expected, .. } => format!("expected {expected}"),
    }
}

fn syntax_diagnostic(origin: &str, e: &SyntaxError) -> CliError {
    CliError::Failed(format!("syntax_error at {origin}:{}: {}", e.pos(), syntax_detail(e)))
}

fn engine_diagnostic(origin: &str, e: &EngineError) -> CliError {
    CliError::Failed(format!("{} at {origin}: {e}", e.class()))
}

fn machine(args: &RunArgs, cfg: &FileConfig) -> Result<Machine, CliError> {
    let origin = args.file.display().to_string();
    let source =
        std::fs::read_to_string(&args.file).map_err(|e| CliError::Failed(format!("cannot read {origin}: {e}")))?;
    let program = parse_program(&source).map_err(|e| syntax_diagnostic(&origin, &e))?;
    let db = consult(&program).map_err(|e| engine_diagnostic(&origin, &e))?;
    let defaults = Budget::default();
    let budget = Budget::new(
        args.max_steps.or(cfg.budget.max_steps).unwrap_or(defaults.max_steps),
        args.timeout_ms
            .or(cfg.budget.timeout_ms)
            .map(Duration::from_millis)
            .unwrap_or(defaults.timeout),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let strategy = match args.label_strategy.as_deref().or(cfg.engine.label_strategy.as_deref()) {
        Some(s) => parse_label_strategy(s)?,
        None => Default::default(),
    };
    Ok(Machine::new(db)
        .with_budget(budget)
        .with_label_strategy(strategy)
        .with_occurs_check(args.occurs_check || cfg.engine.occurs_check.unwrap_or(false)))
}

/// Prints answers to `out`; returns whether there was at least one.
fn answer(m: &Machine, query: &str, limit: Option<usize>, out: &mut impl Write) -> Result<bool, CliError> {
    let mut sols = m.solve_str(query).map_err(|e| syntax_diagnostic("query", &e))?;
    let mut shown = 0usize;
    let mut printed_output = 0usize;
    let io = |e: std::io::Error| CliError::Failed(format!("cannot write output: {e}"));
    while limit.is_none_or(|l| shown < l) {
        let next = sols.next();
        let text = &sols.output()[printed_output..];
        if !text.is_empty() {
            write!(out, "{text}").map_err(io)?;
            printed_output += text.len();
        }
        match next {
            None => break,
            Some(Err(e)) => return Err(engine_diagnostic(&format!("query `{query}`"), &e)),
            Some(Ok(s)) => {
                if shown > 0 {
                    writeln!(out).map_err(io)?;
                }
                let rendered = s.render();
                writeln!(out, "{}", if rendered.is_empty() { "true" } else { &rendered }).map_err(io)?;
                shown += 1;
            }
        }
    }
    if shown == 0 {
        writeln!(out, "false").map_err(io)?;
    }
    Ok(shown > 0)
}

pub fn cmd_run(args: RunArgs, cfg: &FileConfig) -> Result<Exit, CliError> {
    let m = machine(&args, cfg)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Some(q) = &args.query {
        return Ok(if answer(&m, q, args.limit, &mut out)? {
            Exit::Ok
        } else {
            Exit::NoSolution
        });
    }
    // One query per line; the worst outcome decides the exit code.
    let mut exit = Exit::Ok;
    for line in std::io::stdin().lock().lines() {
        let line = line.map_err(|e| CliError::Failed(format!("cannot read stdin: {e}")))?;
        let q = line.trim();
        if q.is_empty() || q.starts_with('%') {
            continue;
        }
        match answer(&m, q, args.limit, &mut out) {
            Ok(true) => {}
            Ok(false) => exit = exit.max(Exit::NoSolution),
            Err(e) => {
                eprintln!("error: {e}");
                exit = Exit::Error;
            }
        }
    }
    Ok(exit)
}
