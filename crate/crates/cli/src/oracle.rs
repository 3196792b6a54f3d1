//! `deduce oracle`: the independent gold-answer checkers.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use deduce_pipeline::oracle::cinema::{cinema, FillOrder};
use deduce_pipeline::oracle::csp::{csp_answers, csp_brute, CspInstance};
use deduce_pipeline::oracle::linear::{format_rational, linear_answer, linear_gold, LinearInstance};
use deduce_pipeline::oracle::navigate::{navigate_oracle, parse_instructions};
use deduce_pipeline::oracle::sumitup::{sum_it_up, SumRule};
use deduce_pipeline::Gold;
use serde::de::DeserializeOwned;

use crate::{CliError, Exit};

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Brute-force a finite CSP from a JSON instance file.
    Csp {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Solve a square linear system exactly.
    Linear(LinearArgs),
    /// Simulate the sum-it-up game.
    Sumitup {
        /// Ten comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        squares: String,
        #[arg(long, allow_hyphen_values = true)]
        waitlist: String,
        /// `plain`, `prev_equal_clears` or `neighbor_sum_zeroes`.
        #[arg(long, default_value = "plain")]
        rule: String,
    },
    /// Greedy seating under the no-orthogonal-neighbor rule.
    Cinema {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Occupied seats as `row:col` pairs, 1-based, comma-separated.
        #[arg(long, default_value = "")]
        seated: String,
        /// `row-major` or `column-major`.
        #[arg(long, default_value = "row-major")]
        order: String,
    },
    /// Distance from the origin after a list of walking instructions.
    Navigate {
        /// Instruction sentences, e.g. "Take 3 steps. Turn right."
        #[arg(long)]
        instructions: String,
    },
}

#[derive(Debug, Args)]
pub struct LinearArgs {
    /// JSON instance with `equations` and an optional `answer` expression.
    #[arg(long, conflicts_with = "equation")]
    pub instance: Option<PathBuf>,
    /// One equation, e.g. `x + y = 3`; repeatable.
    #[arg(long, short = 'e', allow_hyphen_values = true)]
    pub equation: Vec<String>,
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn read_json<T: DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| failed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| failed(format!("invalid instance {}: {e}", path.display())))
}

fn ints(list: &str) -> Result<Vec<i64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("not an integer: `{s}`"))))
        .collect()
}

fn seats(list: &str) -> Result<Vec<(usize, usize)>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (r, c) = s
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("seat `{s}` is not row:col")))?;
            let parse = |v: &str| v.trim().parse().map_err(|_| CliError::Usage(format!("bad seat `{s}`")));
            Ok((parse(r)?, parse(c)?))
        })
        .collect()
}

fn show_gold(g: Gold) -> String {
    match g {
        Gold::Int(i) => i.to_string(),
        Gold::Float(f) => f.to_string(),
    }
}

pub fn cmd_oracle(cmd: OracleCmd) -> Result<Exit, CliError> {
    match cmd {
        OracleCmd::Csp { instance } => {
            let inst: CspInstance = read_json(&instance)?;
            let found = if inst.answer.is_some() {
                let answers = csp_answers(&inst).map_err(failed)?;
                answers.iter().for_each(|a| println!("{a}"));
                !answers.is_empty()
            } else {
                let rows = csp_brute(&inst).map_err(failed)?;
                for row in &rows {
                    let cells: Vec<String> = inst
                        .vars
                        .iter()
                        .zip(row)
                        .map(|(v, x)| format!("{} = {x}", v.name))
                        .collect();
                    println!("{}", cells.join(", "));
                }
                !rows.is_empty()
            };
            if !found {
                println!("no solutions");
                return Ok(Exit::NoSolution);
            }
        }
        OracleCmd::Linear(args) => {
            let inst = match args.instance {
                Some(path) => read_json(&path)?,
                None if !args.equation.is_empty() => LinearInstance {
                    equations: args.equation,
                    answer: None,
                },
                None => return Err(CliError::Usage("give --instance or at least one --equation".into())),
            };
            for (name, value) in linear_gold(&inst.equations).map_err(failed)? {
                println!("{name} = {}", format_rational(&value));
            }
            if inst.answer.is_some() {
                println!("answer = {}", format_rational(&linear_answer(&inst).map_err(failed)?));
            }
        }
        OracleCmd::Sumitup {
            squares,
            waitlist,
            rule,
        } => {
            let rule: SumRule = rule.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            println!(
                "{}",
                sum_it_up(&ints(&squares)?, &ints(&waitlist)?, rule).map_err(failed)?
            );
        }
        OracleCmd::Cinema {
            rows,
            cols,
            seated,
            order,
        } => {
            let order: FillOrder = order.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            println!("{}", cinema(rows, cols, &seats(&seated)?, order).map_err(failed)?);
        }
        OracleCmd::Navigate { instructions } => {
            let ins = parse_instructions(&instructions).map_err(failed)?;
            println!("{}", show_gold(navigate_oracle(&ins)));
        }
    }
    Ok(Exit::Ok)
}
