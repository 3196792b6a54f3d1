//! Repeated multiple-try runs over a problem set, fanned out on a thread
//! pool. Each (problem, repeat) job owns its engine state and transcript
//! file; the report is merged once all jobs finish.

use std::collections::HashMap;
use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use crate::exec::{run_candidate, ExecStatus};
use crate::orchestrator::{multiple_try, OrchestratorError, Outcome};
use crate::policy::RetryPolicy;
use crate::problem::ProblemRecord;
use crate::prompt::{assemble_prompt, default_shots, PromptError, PromptTemplate, Shot};
use crate::provider::Provider;
use crate::report::{EvalReport, RunMetadata};

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub repeats: u32,
    /// Worker threads; `None` uses one per core.
    pub workers: Option<usize>,
    pub transcript_dir: Option<PathBuf>,
    /// Replaces the built-in exemplars for every category.
    pub shots: Option<Vec<Shot>>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            repeats: 1,
            workers: None,
            transcript_dir: None,
            shots: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Orchestrator(#[from] OrchestratorError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("invalid evaluation settings: {0}")]
    Config(String),
}

pub struct EvalRun {
    pub report: EvalReport,
    /// In problem order, repeats ascending.
    pub outcomes: Vec<Outcome>,
}

/// The prompt a problem is asked with.
pub fn prompt_for(problem: &ProblemRecord, shots: Option<&[Shot]>) -> Result<String, PromptError> {
    let template = PromptTemplate::for_category(problem.category);
    match shots {
        Some(s) => assemble_prompt(&problem.statement, s, &template),
        None => assemble_prompt(&problem.statement, &default_shots(problem.category), &template),
    }
}

/// Runs the reference program of every problem that has one and reports
/// whether it reproduces the gold.
pub fn reference_lane(problems: &[ProblemRecord], policy: &RetryPolicy) -> Result<HashMap<String, bool>, EvalError> {
    let budget = policy.budget().map_err(|e| EvalError::Config(e.to_string()))?;
    Ok(problems
        .par_iter()
        .filter_map(|p| {
            let src = p.reference_program.as_ref()?;
            let r = run_candidate(src, &p.entry(), budget);
            let ok = r.status == ExecStatus::Ok && r.answer.as_ref().is_some_and(|a| p.gold.matches(a));
            if !ok {
                log::warn!("{}: reference program gave {} {:?}", p.id, r.status, r.answer);
            }
            Some((p.id.clone(), ok))
        })
        .collect())
}

pub fn evaluate(
    problems: &[ProblemRecord],
    provider: &dyn Provider,
    policy: &RetryPolicy,
    opts: &EvalOptions,
) -> Result<EvalRun, EvalError> {
    if opts.repeats == 0 {
        return Err(EvalError::Config("repeats must be at least 1".into()));
    }
    policy.validate().map_err(|e| EvalError::Config(e.to_string()))?;
    let prompts: Vec<String> = problems
        .iter()
        .map(|p| prompt_for(p, opts.shots.as_deref()))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, u32)> = (0..problems.len())
        .flat_map(|i| (0..opts.repeats).map(move |r| (i, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| EvalError::Config(e.to_string()))?;
    let (outcomes, reference_ok) = pool.install(|| {
        let outcomes = jobs
            .par_iter()
            .map(|&(i, r)| {
                multiple_try(
                    &problems[i],
                    provider,
                    policy,
                    &prompts[i],
                    r,
                    opts.transcript_dir.as_deref(),
                )
            })
            .collect::<Result<Vec<Outcome>, _>>();
        (outcomes, reference_lane(problems, policy))
    });
    let outcomes = outcomes?;
    let run = RunMetadata {
        provider: provider.describe(),
        policy: *policy,
        repeats: opts.repeats,
        seed_scheme: "sha256(problem_id, repeat, attempt)[0..8] little-endian".into(),
    };
    let report = EvalReport::from_outcomes(problems, &outcomes, &reference_ok?, Some(run));
    Ok(EvalRun { report, outcomes })
}
