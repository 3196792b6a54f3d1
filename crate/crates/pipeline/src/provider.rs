//! Completion providers: scripted, replayed from transcripts, or live over
//! an OpenAI-compatible chat-completions endpoint.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::problem::ProblemRecord;
use crate::transcript::{read_transcript, transcript_path, TranscriptRecord};

/// Everything a provider may use to produce one completion.
pub struct CompletionRequest<'a> {
    pub problem: &'a ProblemRecord,
    pub repeat: u32,
    pub attempt: u32,
    pub temperature: f64,
    pub prompt: &'a str,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    #[error("network error: {0}")]
    Network(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("HTTP status {status}: {message}")]
    Http { status: u16, message: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    /// A provider failure replayed from a transcript.
    #[error("{0}")]
    Recorded(String),
    #[error("missing credential: environment variable {0} is not set")]
    MissingCredential(String),
    #[error("transcript exhausted for {problem_id} repeat {repeat} attempt {attempt}")]
    TranscriptExhausted {
        problem_id: String,
        repeat: u32,
        attempt: u32,
    },
    #[error("invalid provider spec: {0}")]
    Spec(String),
}

impl ProviderError {
    /// Fatal errors abort the run; the rest count as a failed attempt.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            ProviderError::TranscriptExhausted { .. } | ProviderError::MissingCredential(_) | ProviderError::Spec(_)
        )
    }
}

pub trait Provider: Send + Sync {
    fn describe(&self) -> String;
    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, ProviderError>;
}

/// Per-attempt seed: the first 8 bytes of SHA-256 over the problem id,
/// repeat and attempt index.
pub fn attempt_seed(problem_id: &str, repeat: u32, attempt: u32) -> u64 {
    let d = Sha256::digest(format!("{problem_id}\u{0}{repeat}\u{0}{attempt}").as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("digest has 8 bytes"))
}

/// A completion with no program in it.
pub const PROSE: &str = "I think the answer follows from reading the problem carefully, \
but I am not able to write it down as a program right now.";

pub fn fenced(program: &str) -> String {
    format!("Here is the program.\n```prolog\n{}\n```\n", program.trim_end())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Script {
    /// Attempt k gets item k; attempts past the end repeat the last item.
    Sequence(Vec<String>),
    /// The problem's reference program in a fenced block (prose if none).
    Reference,
    Prose,
    /// Prose with probability `fail_p`, otherwise the reference program.
    /// Each draw is seeded from `(seed, problem, repeat, attempt)`.
    Stochastic {
        fail_p: f64,
        seed: u64,
    },
}

pub struct ScriptedProvider {
    script: Script,
}

impl ScriptedProvider {
    pub fn new(script: Script) -> Result<ScriptedProvider, ProviderError> {
        match &script {
            Script::Sequence(v) if v.is_empty() => {
                return Err(ProviderError::Spec("scripted sequence is empty".into()))
            }
            Script::Stochastic { fail_p, .. } if !(0.0..=1.0).contains(fail_p) => {
                return Err(ProviderError::Spec(format!(
                    "failure probability {fail_p} outside [0, 1]"
                )))
            }
            _ => {}
        }
        Ok(ScriptedProvider { script })
    }

    fn reference(problem: &ProblemRecord) -> String {
        match &problem.reference_program {
            Some(p) => fenced(p),
            None => PROSE.to_owned(),
        }
    }
}

impl Provider for ScriptedProvider {
    fn describe(&self) -> String {
        match &self.script {
            Script::Sequence(v) => format!("scripted:sequence({})", v.len()),
            Script::Reference => "scripted:reference".into(),
            Script::Prose => "scripted:prose".into(),
            Script::Stochastic { fail_p, seed } => format!("scripted:stochastic:{fail_p}:{seed}"),
        }
    }

    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        Ok(match &self.script {
            Script::Sequence(v) => v[(req.attempt as usize).min(v.len() - 1)].clone(),
            Script::Reference => Self::reference(req.problem),
            Script::Prose => PROSE.to_owned(),
            Script::Stochastic { fail_p, seed } => {
                let key = attempt_seed(&format!("{seed}\u{0}{}", req.problem.id), req.repeat, req.attempt);
                let mut rng = ChaCha8Rng::seed_from_u64(key);
                if rng.random_bool(*fail_p) {
                    PROSE.to_owned()
                } else {
                    Self::reference(req.problem)
                }
            }
        })
    }
}

/// Serves completions recorded in a transcript directory.
pub struct ReplayProvider {
    dir: PathBuf,
    cache: Mutex<HashMap<PathBuf, Arc<Vec<TranscriptRecord>>>>,
}

impl ReplayProvider {
    pub fn new(dir: impl Into<PathBuf>) -> ReplayProvider {
        ReplayProvider {
            dir: dir.into(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn records(&self, path: &Path) -> Option<Arc<Vec<TranscriptRecord>>> {
        let mut cache = self.cache.lock().expect("replay cache lock");
        if let Some(r) = cache.get(path) {
            return Some(r.clone());
        }
        let recs = match read_transcript(path) {
            Ok(r) => Arc::new(r),
            Err(e) => {
                log::warn!("cannot replay {}: {e}", path.display());
                return None;
            }
        };
        cache.insert(path.to_owned(), recs.clone());
        Some(recs)
    }
}

impl Provider for ReplayProvider {
    fn describe(&self) -> String {
        format!("replay:{}", self.dir.display())
    }

    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let exhausted = || ProviderError::TranscriptExhausted {
            problem_id: req.problem.id.clone(),
            repeat: req.repeat,
            attempt: req.attempt,
        };
        let path = transcript_path(&self.dir, &req.problem.id, req.repeat);
        let recs = self.records(&path).ok_or_else(exhausted)?;
        let rec = recs
            .iter()
            .find(|r| r.attempt == req.attempt && r.problem_id == req.problem.id)
            .ok_or_else(exhausted)?;
        match &rec.provider_error {
            Some(msg) => Err(ProviderError::Recorded(msg.clone())),
            None => Ok(rec.completion.clone()),
        }
    }
}

/// Settings for a chat-completions endpoint. The token itself is only ever
/// read from the environment variable named by `token_env`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LiveConfig {
    pub base_url: String,
    pub model: String,
    pub token_env: String,
    pub timeout_secs: u64,
    pub send_seed: bool,
    pub max_tokens: Option<u32>,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o".into(),
            token_env: "DEDUCE_API_KEY".into(),
            timeout_secs: 120,
            send_seed: true,
            max_tokens: None,
        }
    }
}

pub struct LiveProvider {
    cfg: LiveConfig,
    token: String,
    agent: ureq::Agent,
}

impl LiveProvider {
    pub fn from_env(cfg: LiveConfig) -> Result<LiveProvider, ProviderError> {
        let token = std::env::var(&cfg.token_env)
            .ok()
            .filter(|t| !t.trim().is_empty())
            .ok_or_else(|| ProviderError::MissingCredential(cfg.token_env.clone()))?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs.max(1))))
            .build()
            .into();
        Ok(LiveProvider { cfg, token, agent })
    }

    fn body(&self, req: &CompletionRequest<'_>) -> serde_json::Value {
        let mut body = serde_json::json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
        });
        if self.cfg.send_seed {
            body["seed"] = req.seed.into();
        }
        if let Some(m) = self.cfg.max_tokens {
            body["max_tokens"] = m.into();
        }
        body
    }
}

impl Provider for LiveProvider {
    fn describe(&self) -> String {
        format!("live:{}@{}", self.cfg.model, self.cfg.base_url)
    }

    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let url = format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'));
        let resp = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.token))
            .send_json(self.body(req));
        let mut resp = match resp {
            Ok(r) => r,
            Err(ureq::Error::StatusCode(s @ (401 | 403))) => {
                return Err(ProviderError::Auth(format!("endpoint answered {s}")))
            }
            Err(ureq::Error::StatusCode(status)) => {
                return Err(ProviderError::Http {
                    status,
                    message: "request rejected".into(),
                })
            }
            Err(e) => return Err(ProviderError::Network(e.to_string())),
        };
        let v: serde_json::Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::Malformed(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(str::to_owned)
            .ok_or_else(|| ProviderError::Malformed("no choices[0].message.content".into()))
    }
}

/// Textual provider selection:
/// `scripted:reference`, `scripted:prose`, `scripted:stochastic:P:SEED`,
/// `scripted:file:PATH` (JSON list of completions), `replay:DIR`, `live`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProviderSpec {
    Scripted(Script),
    ScriptedFile(PathBuf),
    Replay(PathBuf),
    Live,
}

impl FromStr for ProviderSpec {
    type Err = ProviderError;

    fn from_str(s: &str) -> Result<ProviderSpec, ProviderError> {
        let bad = || ProviderError::Spec(s.to_owned());
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "live" if rest.is_empty() => Ok(ProviderSpec::Live),
            "replay" if !rest.is_empty() => Ok(ProviderSpec::Replay(rest.into())),
            "scripted" => {
                let (mode, arg) = rest.split_once(':').unwrap_or((rest, ""));
                match mode {
                    "reference" => Ok(ProviderSpec::Scripted(Script::Reference)),
                    "prose" => Ok(ProviderSpec::Scripted(Script::Prose)),
                    "file" if !arg.is_empty() => Ok(ProviderSpec::ScriptedFile(arg.into())),
                    "stochastic" => {
                        let (p, seed) = arg.split_once(':').ok_or_else(bad)?;
                        Ok(ProviderSpec::Scripted(Script::Stochastic {
                            fail_p: p.parse().map_err(|_| bad())?,
                            seed: seed.parse().map_err(|_| bad())?,
                        }))
                    }
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

impl ProviderSpec {
    pub fn build(&self, live: &LiveConfig) -> Result<Box<dyn Provider>, ProviderError> {
        Ok(match self {
            ProviderSpec::Scripted(s) => Box::new(ScriptedProvider::new(s.clone())?),
            ProviderSpec::ScriptedFile(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ProviderError::Spec(format!("{}: {e}", path.display())))?;
                let items: Vec<String> =
                    serde_json::from_str(&text).map_err(|e| ProviderError::Spec(format!("{}: {e}", path.display())))?;
                Box::new(ScriptedProvider::new(Script::Sequence(items))?)
            }
            ProviderSpec::Replay(dir) => Box::new(ReplayProvider::new(dir.clone())),
            ProviderSpec::Live => Box::new(LiveProvider::from_env(live.clone())?),
        })
    }
}
