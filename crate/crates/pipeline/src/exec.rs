//! Running one candidate program against its entry query.

use std::fmt;
use std::str::FromStr;

use deduce_core::{consult, parse_program, parse_query, Budget, EngineError, Machine, Number, Query, Term};
use serde::{Deserialize, Serialize};

use crate::answer::Answer;

/// Outcome class of a single attempt. `ProviderError` marks attempts where
/// no completion was obtained at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecStatus {
    ParseError,
    RuntimeError,
    BudgetExceeded,
    NoSolution,
    NonNumeric,
    Underdetermined,
    Ok,
    ProviderError,
}

impl ExecStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ExecStatus::ParseError => "parse-error",
            ExecStatus::RuntimeError => "runtime-error",
            ExecStatus::BudgetExceeded => "budget-exceeded",
            ExecStatus::NoSolution => "no-solution",
            ExecStatus::NonNumeric => "non-numeric",
            ExecStatus::Underdetermined => "underdetermined",
            ExecStatus::Ok => "ok",
            ExecStatus::ProviderError => "provider-error",
        }
    }
}

impl fmt::Display for ExecStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which constraint solvers a successful run touched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverRoute {
    Fd,
    Rational,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecResult {
    pub status: ExecStatus,
    /// Present iff `status` is `Ok`.
    pub answer: Option<Answer>,
    pub detail: String,
    pub route: Option<SolverRoute>,
}

impl ExecResult {
    fn fail(status: ExecStatus, detail: impl Into<String>) -> ExecResult {
        ExecResult {
            status,
            answer: None,
            detail: detail.into(),
            route: None,
        }
    }
}

/// Entry query whose last argument is the answer variable.
#[derive(Clone, Debug)]
pub struct Entry {
    text: String,
    query: Query,
    answer_var: String,
}

impl Entry {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn answer_var(&self) -> &str {
        &self.answer_var
    }
}

impl Default for Entry {
    fn default() -> Self {
        "problem(X)".parse().expect("default entry parses")
    }
}

impl FromStr for Entry {
    type Err = String;

    fn from_str(text: &str) -> Result<Entry, String> {
        let query = parse_query(text).map_err(|e| format!("entry `{text}`: {e}"))?;
        let last = match &query.goal {
            Term::Compound(_, args) => args.last(),
            _ => None,
        };
        let answer_var = match last {
            Some(Term::Var(v)) => query.var_names.iter().find(|(_, id)| id == v).map(|(n, _)| n.clone()),
            _ => None,
        }
        .ok_or_else(|| format!("entry `{text}` must end with a named answer variable"))?;
        Ok(Entry {
            text: text.to_owned(),
            query,
            answer_var,
        })
    }
}

/// Consults `source`, solves `entry` under `budget` and classifies the
/// first answer. Never panics on bad input; every failure is a status.
pub fn run_candidate(source: &str, entry: &Entry, budget: Budget) -> ExecResult {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => return ExecResult::fail(ExecStatus::ParseError, e.to_string()),
    };
    let db = match consult(&program) {
        Ok(db) => db,
        Err(e) => return ExecResult::fail(ExecStatus::RuntimeError, format!("{}: {e}", e.class())),
    };
    let machine = Machine::new(db).with_budget(budget);
    let mut sols = machine.solve(&entry.query);
    let first = sols.next();
    let stats = sols.stats();
    let route = match (stats.fd_routed > 0, stats.r_routed > 0) {
        (true, true) => Some(SolverRoute::Both),
        (true, false) => Some(SolverRoute::Fd),
        (false, true) => Some(SolverRoute::Rational),
        (false, false) => None,
    };
    let sol = match first {
        None => return ExecResult::fail(ExecStatus::NoSolution, "entry query failed"),
        Some(Err(e @ EngineError::BudgetExceeded(_))) => {
            return ExecResult::fail(ExecStatus::BudgetExceeded, e.to_string())
        }
        Some(Err(e)) => return ExecResult::fail(ExecStatus::RuntimeError, format!("{}: {e}", e.class())),
        Some(Ok(sol)) => sol,
    };
    let value = sol.get(&entry.answer_var).cloned().unwrap_or(Term::nil());
    let mut result = match &value {
        _ if sol.is_constrained(&entry.answer_var) => ExecResult::fail(
            ExecStatus::Underdetermined,
            format!("answer still constrained: {}", sol.residue.join(", ")),
        ),
        Term::Var(_) => ExecResult::fail(ExecStatus::Underdetermined, "answer variable left unbound"),
        t => match Number::from_term(t) {
            Some(n) => ExecResult {
                status: ExecStatus::Ok,
                answer: Some(Answer(n)),
                detail: String::new(),
                route: None,
            },
            None => ExecResult::fail(ExecStatus::NonNumeric, format!("answer is {}", sols.show(t))),
        },
    };
    result.route = route;
    if result.status == ExecStatus::Ok && matches!(sols.next(), Some(Ok(_))) {
        log::info!("entry `{}` has more than one answer; keeping the first", entry.text);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> ExecResult {
        run_candidate(src, &Entry::default(), Budget::default())
    }

    #[test]
    fn status_taxonomy() {
        assert_eq!(run("problem(X) :- X is 6 * 7.").answer.unwrap().to_string(), "42");
        assert_eq!(run("problem(X :- .").status, ExecStatus::ParseError);
        assert_eq!(run("problem(X) :- missing(X).").status, ExecStatus::RuntimeError);
        assert_eq!(run("problem(_) :- fail.").status, ExecStatus::NoSolution);
        assert_eq!(run("problem(tree).").status, ExecStatus::NonNumeric);
        assert_eq!(run("problem(_).").status, ExecStatus::Underdetermined);
        assert_eq!(run("problem(X) :- X #> 3.").status, ExecStatus::Underdetermined);
        let tight = Budget::new(10_000, std::time::Duration::from_secs(5)).unwrap();
        let looping = run_candidate("problem(X) :- loop(X). loop(X) :- loop(X).", &Entry::default(), tight);
        assert_eq!(looping.status, ExecStatus::BudgetExceeded);
        assert_eq!(run("X = 1.").status, ExecStatus::RuntimeError);
        let r = run("problem(X) :- {X * 3 = 1}.");
        assert_eq!(r.status, ExecStatus::Ok);
        assert_eq!(r.route, Some(SolverRoute::Rational));
        assert!(r.answer.unwrap().is_exact());
    }

    #[test]
    fn entry_validation() {
        let e: Entry = "solve(a, N)".parse().unwrap();
        assert_eq!(e.answer_var(), "N");
        assert!("solve(a, b)".parse::<Entry>().is_err());
        assert!("solve".parse::<Entry>().is_err());
        assert!("solve(".parse::<Entry>().is_err());
    }
}
