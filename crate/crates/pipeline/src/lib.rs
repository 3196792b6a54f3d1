//! Program-synthesis pipeline around the `deduce-core` engine.
//!
//! A provider turns a few-shot prompt into a completion; the program in it
//! is extracted and run; failed attempts are retried at a linearly rising
//! temperature. The harness side loads problem sets, certifies gold answers
//! with independent oracles, evaluates providers over repeated runs and
//! renders reports.

pub mod answer;
pub mod eval;
pub mod exec;
pub mod extract;
pub mod fixtures;
pub mod oracle;
pub mod orchestrator;
pub mod policy;
pub mod problem;
pub mod prompt;
pub mod provider;
pub mod report;
pub mod transcript;

pub use answer::{Answer, Gold};
pub use eval::{evaluate, EvalOptions, EvalRun};
pub use exec::{run_candidate, Entry, ExecResult, ExecStatus};
pub use extract::extract_program;
pub use orchestrator::{multiple_try, Attempt, Outcome};
pub use policy::RetryPolicy;
pub use problem::{load_problems, Category, ProblemRecord};
pub use provider::{Provider, ProviderSpec};
pub use report::{emit_report, EvalReport, ReportFormat};
