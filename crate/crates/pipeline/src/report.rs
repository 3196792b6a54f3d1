//! Evaluation reports and their JSON, CSV and markdown renderings.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::orchestrator::Outcome;
use crate::policy::RetryPolicy;
use crate::problem::{Category, ProblemRecord};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemReport {
    pub id: String,
    pub category: Category,
    pub correct_runs: u32,
    pub total_runs: u32,
    /// `correct_runs / total_runs`.
    pub accuracy: f64,
    pub mean_attempts: f64,
    /// Whether the reference program reproduced the gold directly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryReport {
    pub problems: u32,
    pub correct_runs: u32,
    pub total_runs: u32,
    /// Pooled over runs: `correct_runs / total_runs`.
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunMetadata {
    pub provider: String,
    pub policy: RetryPolicy,
    pub repeats: u32,
    /// How per-attempt seeds are derived.
    pub seed_scheme: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub problems: Vec<ProblemReport>,
    pub categories: BTreeMap<String, CategoryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunMetadata>,
}

impl EvalReport {
    /// Scores `outcomes` against the golds of `problems`. Problems without
    /// outcomes are left out; order follows `problems`.
    pub fn from_outcomes(
        problems: &[ProblemRecord],
        outcomes: &[Outcome],
        reference_ok: &HashMap<String, bool>,
        run: Option<RunMetadata>,
    ) -> EvalReport {
        let mut by_id: HashMap<&str, Vec<&Outcome>> = HashMap::new();
        for o in outcomes {
            by_id.entry(o.problem_id.as_str()).or_default().push(o);
        }
        let mut report = EvalReport {
            run,
            ..EvalReport::default()
        };
        for p in problems {
            let Some(runs) = by_id.get(p.id.as_str()) else {
                continue;
            };
            let total = runs.len() as u32;
            let correct = runs
                .iter()
                .filter(|o| o.final_answer.as_ref().is_some_and(|a| p.gold.matches(a)))
                .count() as u32;
            let attempts: u64 = runs.iter().map(|o| o.attempts_used as u64).sum();
            report.problems.push(ProblemReport {
                id: p.id.clone(),
                category: p.category,
                correct_runs: correct,
                total_runs: total,
                accuracy: correct as f64 / total as f64,
                mean_attempts: attempts as f64 / total as f64,
                reference_ok: reference_ok.get(&p.id).copied(),
            });
            let c = report
                .categories
                .entry(p.category.as_str().to_owned())
                .or_insert(CategoryReport {
                    problems: 0,
                    correct_runs: 0,
                    total_runs: 0,
                    accuracy: 0.0,
                });
            c.problems += 1;
            c.correct_runs += correct;
            c.total_runs += total;
            c.accuracy = c.correct_runs as f64 / c.total_runs as f64;
        }
        report
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format `{s}`")),
        }
    }
}

/// Rounds to 6 decimals and drops trailing zeros.
fn num(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    format!("{r}")
}

pub fn emit_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string(report).expect("report serializes"),
        ReportFormat::Csv => csv_report(report),
        ReportFormat::Markdown => markdown_report(report),
    }
}

fn csv_report(report: &EvalReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let row = |w: &mut csv::Writer<Vec<u8>>, cells: [String; 7]| w.write_record(cells).expect("in-memory csv");
    row(
        &mut w,
        [
            "scope",
            "id",
            "category",
            "correct_runs",
            "total_runs",
            "accuracy",
            "mean_attempts",
        ]
        .map(String::from),
    );
    for p in &report.problems {
        row(
            &mut w,
            [
                "problem".into(),
                p.id.clone(),
                p.category.to_string(),
                p.correct_runs.to_string(),
                p.total_runs.to_string(),
                num(p.accuracy),
                num(p.mean_attempts),
            ],
        );
    }
    for (name, c) in &report.categories {
        row(
            &mut w,
            [
                "category".into(),
                String::new(),
                name.clone(),
                c.correct_runs.to_string(),
                c.total_runs.to_string(),
                num(c.accuracy),
                String::new(),
            ],
        );
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn markdown_report(report: &EvalReport) -> String {
    let mut out = String::new();
    if let Some(run) = &report.run {
        let _ = writeln!(
            out,
            "Provider `{}`, {} repeats, at most {} attempts, temperature {} to {}.\n",
            run.provider, run.repeats, run.policy.max_attempts, run.policy.temp_start, run.policy.temp_end
        );
    }
    out.push_str("| category | problems | correct runs | total runs | accuracy |\n");
    out.push_str("|---|---:|---:|---:|---:|\n");
    for (name, c) in &report.categories {
        let _ = writeln!(
            out,
            "| {name} | {} | {} | {} | {} |",
            c.problems,
            c.correct_runs,
            c.total_runs,
            num(c.accuracy)
        );
    }
    out.push_str("\n| problem | category | correct runs | total runs | accuracy | mean attempts |\n");
    out.push_str("|---|---|---:|---:|---:|---:|\n");
    for p in &report.problems {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            p.id,
            p.category,
            p.correct_runs,
            p.total_runs,
            num(p.accuracy),
            num(p.mean_attempts)
        );
    }
    out
}
