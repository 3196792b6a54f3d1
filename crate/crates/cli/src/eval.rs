//! `deduce eval` and `deduce gen-navigate`.

use std::path::{Path, PathBuf};

use clap::Args;
use deduce_pipeline::eval::{evaluate, EvalOptions};
use deduce_pipeline::fixtures::fixtures;
use deduce_pipeline::oracle::navigate::gen_navigate;
use deduce_pipeline::problem::{problems_to_json, select_subset};
use deduce_pipeline::prompt::Shot;
use deduce_pipeline::provider::{LiveConfig, ProviderSpec};
use deduce_pipeline::{emit_report, load_problems, ProblemRecord, ReportFormat, RetryPolicy};

use crate::config::FileConfig;
use crate::{CliError, Exit};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// `fixtures` for the built-in set, or a problems JSON file.
    #[arg(long, default_value = "fixtures")]
    pub dataset: String,
    /// Also include the built-in fixtures when loading a file.
    #[arg(long)]
    pub with_fixtures: bool,
    /// Comma-separated problem ids to keep, in order.
    #[arg(long)]
    pub subset: Option<String>,
    /// `scripted:reference`, `scripted:prose`, `scripted:stochastic:P:SEED`,
    /// `scripted:file:PATH`, `replay:DIR` or `live`.
    #[arg(long)]
    pub provider: String,
    #[arg(long)]
    pub repeats: Option<u32>,
    /// Directory receiving transcripts, outcomes and reports.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Comma-separated subset of `json,csv,markdown`.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub max_attempts: Option<u32>,
    #[arg(long)]
    pub temp_start: Option<f64>,
    #[arg(long)]
    pub temp_end: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// JSON list of `{"problem", "program"}` exemplars replacing the defaults.
    #[arg(long)]
    pub shots: Option<PathBuf>,
    #[arg(long)]
    pub base_url: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Name of the environment variable holding the API token.
    #[arg(long)]
    pub token_env: Option<String>,
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn dataset(args: &EvalArgs, cfg: &FileConfig) -> Result<Vec<ProblemRecord>, CliError> {
    let all = if args.dataset == "fixtures" {
        fixtures()
    } else {
        load_problems(Path::new(&args.dataset), args.with_fixtures).map_err(failed)?
    };
    let ids: Option<Vec<String>> = match &args.subset {
        Some(s) => Some(
            s.split(',')
                .map(|id| id.trim().to_owned())
                .filter(|id| !id.is_empty())
                .collect(),
        ),
        None => cfg.eval.subset.clone(),
    };
    let problems = match ids {
        Some(ids) => select_subset(&all, &ids).map_err(failed)?,
        None => all,
    };
    if problems.is_empty() {
        return Err(CliError::Usage("the dataset has no problems".into()));
    }
    Ok(problems)
}

fn policy(args: &EvalArgs, cfg: &FileConfig) -> Result<RetryPolicy, CliError> {
    let d = RetryPolicy::default();
    let p = RetryPolicy {
        max_attempts: args.max_attempts.or(cfg.policy.max_attempts).unwrap_or(d.max_attempts),
        temp_start: args.temp_start.or(cfg.policy.temp_start).unwrap_or(d.temp_start),
        temp_end: args.temp_end.or(cfg.policy.temp_end).unwrap_or(d.temp_end),
        max_steps: args.max_steps.or(cfg.budget.max_steps).unwrap_or(d.max_steps),
        timeout_ms: args.timeout_ms.or(cfg.budget.timeout_ms).unwrap_or(d.timeout_ms),
    };
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    p.budget().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn live_config(args: &EvalArgs, cfg: &FileConfig) -> LiveConfig {
    let d = LiveConfig::default();
    let l = &cfg.live;
    LiveConfig {
        base_url: args
            .base_url
            .clone()
            .or_else(|| l.base_url.clone())
            .unwrap_or(d.base_url),
        model: args.model.clone().or_else(|| l.model.clone()).unwrap_or(d.model),
        token_env: args
            .token_env
            .clone()
            .or_else(|| l.token_env.clone())
            .unwrap_or(d.token_env),
        timeout_secs: l.timeout_secs.unwrap_or(d.timeout_secs),
        send_seed: l.send_seed.unwrap_or(d.send_seed),
        max_tokens: l.max_tokens.or(d.max_tokens),
    }
}

fn formats(args: &EvalArgs, cfg: &FileConfig) -> Result<Vec<ReportFormat>, CliError> {
    let names: Vec<String> = match &args.format {
        Some(s) => s.split(',').map(|f| f.trim().to_owned()).collect(),
        None => cfg
            .eval
            .formats
            .clone()
            .unwrap_or_else(|| vec!["json".into(), "csv".into(), "markdown".into()]),
    };
    names.iter().map(|n| n.parse().map_err(CliError::Usage)).collect()
}

fn shots(args: &EvalArgs, cfg: &FileConfig) -> Result<Option<Vec<Shot>>, CliError> {
    let Some(path) = args.shots.as_ref().or(cfg.prompt.shots.as_ref()) else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| failed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| CliError::Usage(format!("invalid shots file {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| failed(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_eval(args: EvalArgs, cfg: &FileConfig) -> Result<Exit, CliError> {
    let problems = dataset(&args, cfg)?;
    let policy = policy(&args, cfg)?;
    let formats = formats(&args, cfg)?;
    let spec: ProviderSpec = args.provider.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
    let provider = spec.build(&live_config(&args, cfg)).map_err(failed)?;
    let transcripts = args.out.join("transcripts");
    std::fs::create_dir_all(&transcripts)
        .map_err(|e| failed(format!("cannot create {}: {e}", transcripts.display())))?;
    let opts = EvalOptions {
        repeats: args.repeats.or(cfg.eval.repeats).unwrap_or(1),
        workers: args.workers.or(cfg.eval.workers),
        transcript_dir: Some(transcripts),
        shots: shots(&args, cfg)?,
    };
    let run = evaluate(&problems, provider.as_ref(), &policy, &opts).map_err(failed)?;
    let outcomes: String = run.outcomes.iter().map(|o| o.to_json() + "\n").collect();
    write(&args.out.join("outcomes.jsonl"), &outcomes)?;
    for f in formats {
        write(
            &args.out.join(format!("report.{}", f.extension())),
            &emit_report(&run.report, f),
        )?;
    }
    let (mut correct, mut total) = (0, 0);
    for (name, c) in &run.report.categories {
        println!(
            "{name}: accuracy {:.3} ({}/{})",
            c.accuracy, c.correct_runs, c.total_runs
        );
        correct += c.correct_runs;
        total += c.total_runs;
    }
    println!(
        "overall: accuracy {:.3} ({correct}/{total})",
        correct as f64 / total as f64
    );
    Ok(Exit::Ok)
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of problems, at least 1.
    #[arg(short = 'n', long = "count")]
    pub n: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_gen_navigate(args: GenArgs) -> Result<Exit, CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("-n must be at least 1".into()));
    }
    let problems = gen_navigate(args.seed, args.n).map_err(failed)?;
    let json = problems_to_json(&problems);
    match &args.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    Ok(Exit::Ok)
}
