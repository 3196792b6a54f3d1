//! The multiple-try loop: ask for a program, run it, and retry at a higher
//! temperature until one run yields a number or the attempt cap is hit.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::answer::Answer;
use crate::exec::{run_candidate, ExecStatus, SolverRoute};
use crate::extract::extract_program;
use crate::policy::{PolicyError, RetryPolicy};
use crate::problem::ProblemRecord;
use crate::prompt::sha256_hex;
use crate::provider::{attempt_seed, CompletionRequest, Provider, ProviderError};
use crate::transcript::{TranscriptRecord, TranscriptWriter};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extraction {
    Program(String),
    Failure,
}

/// Invariants: `exec_status == Ok` iff `answer` is present; `temperature`
/// equals the policy's `temperature_at(index)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attempt {
    pub index: u32,
    pub temperature: f64,
    pub prompt_hash: String,
    pub seed: u64,
    pub completion: String,
    pub extraction: Extraction,
    pub exec_status: ExecStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<Answer>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<SolverRoute>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
    /// Wall time is kept out of serialization so replays compare equal.
    #[serde(skip)]
    pub wall_ms: u64,
}

/// Invariants: only the last attempt may be `Ok`, and `final_answer` is its
/// answer; `attempts_used == attempts.len() <= max_attempts`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub problem_id: String,
    pub repeat: u32,
    pub final_answer: Option<Answer>,
    pub attempts: Vec<Attempt>,
    pub attempts_used: u32,
}

impl Outcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("outcome serializes")
    }
}

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("cannot write transcript: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs one multiple-try episode. Each attempt is appended to the
/// transcript (when `transcript_dir` is set) before the next provider call.
/// Non-fatal provider errors become failed attempts; fatal ones abort.
pub fn multiple_try(
    problem: &ProblemRecord,
    provider: &dyn Provider,
    policy: &RetryPolicy,
    prompt: &str,
    repeat: u32,
    transcript_dir: Option<&Path>,
) -> Result<Outcome, OrchestratorError> {
    policy.validate()?;
    let budget = policy.budget()?;
    let entry = problem.entry();
    let prompt_hash = sha256_hex(prompt);
    let mut writer = transcript_dir
        .map(|d| TranscriptWriter::create(d, &problem.id, repeat))
        .transpose()?;
    let mut attempts = Vec::new();
    let mut final_answer = None;
    for k in 0..policy.max_attempts {
        let temperature = policy.temperature_at(k)?;
        let seed = attempt_seed(&problem.id, repeat, k);
        let started = Instant::now();
        let req = CompletionRequest {
            problem,
            repeat,
            attempt: k,
            temperature,
            prompt,
            seed,
        };
        let (completion, extraction, exec, provider_error) = match provider.complete(&req) {
            Err(e) if e.is_fatal() => return Err(e.into()),
            Err(e) => {
                log::warn!("{} attempt {k}: {e}", problem.id);
                (String::new(), Extraction::Failure, None, Some(e.to_string()))
            }
            Ok(text) => match extract_program(&text) {
                Ok(src) => {
                    let r = run_candidate(&src, &entry, budget);
                    (text, Extraction::Program(src), Some(r), None)
                }
                Err(_) => (text, Extraction::Failure, None, None),
            },
        };
        let wall_ms = started.elapsed().as_millis() as u64;
        let (exec_status, answer, route, detail) = match (exec, &provider_error) {
            (Some(r), _) => (r.status, r.answer, r.route, r.detail),
            (None, Some(msg)) => (ExecStatus::ProviderError, None, None, msg.clone()),
            (None, None) => (
                ExecStatus::ParseError,
                None,
                None,
                "no program in completion".to_owned(),
            ),
        };
        log::debug!(
            "{} r{repeat} attempt {k} at t={temperature:.4}: {exec_status}",
            problem.id
        );
        if let Some(w) = writer.as_mut() {
            w.append(&TranscriptRecord {
                problem_id: problem.id.clone(),
                attempt: k,
                temperature,
                prompt_sha256: prompt_hash.clone(),
                completion: completion.clone(),
                exec_status,
                answer: answer.clone(),
                wall_ms,
                seed: Some(seed),
                route,
                provider_error,
            })?;
        }
        let done = exec_status == ExecStatus::Ok;
        if done {
            final_answer = answer.clone();
        }
        attempts.push(Attempt {
            index: k,
            temperature,
            prompt_hash: prompt_hash.clone(),
            seed,
            completion,
            extraction,
            exec_status,
            answer,
            route,
            detail,
            wall_ms,
        });
        if done {
            break;
        }
    }
    Ok(Outcome {
        problem_id: problem.id.clone(),
        repeat,
        final_answer,
        attempts_used: attempts.len() as u32,
        attempts,
    })
}
