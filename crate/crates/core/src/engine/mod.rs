//! SLD resolution over a consulted program.
//!
//! Goals run left to right, clauses top-down, with chronological
//! backtracking. Every choice point records a mark of the bindings and of
//! both constraint stores; popping it restores all three.

mod builtins;
mod db;
mod machine;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

pub use builtins::{builtin_names, is_protected};
pub use db::{consult, Database};
pub use machine::SolveStats;

use crate::clpr::LinExpr;
use crate::error::EngineError;
use crate::fd::LabelStrategy;
use crate::reader::Query;
use crate::term::{Term, VarId};
use crate::write::term_to_string_named;
use machine::{frame, State};

/// Per-query resource limits. Both limits are strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
    pub timeout: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 5_000_000,
            timeout: Duration::from_secs(10),
        }
    }
}

impl Budget {
    pub fn new(max_steps: u64, timeout: Duration) -> Result<Budget, EngineError> {
        if max_steps == 0 || timeout.is_zero() {
            return Err(EngineError::Domain("budget limits must be positive".into()));
        }
        Ok(Budget { max_steps, timeout })
    }
}

/// One answer: named query variables with their resolved values.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub bindings: Vec<(String, Term)>,
    /// Finite-domain variables were labeled implicitly to reach this answer.
    pub auto_labeled: bool,
    /// Query variables whose value is still constrained but not fixed.
    pub constrained: Vec<String>,
    /// Residual constraints, one per line.
    pub residue: Vec<String>,
}

impl Solution {
    pub fn get(&self, name: &str) -> Option<&Term> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn is_constrained(&self, name: &str) -> bool {
        self.constrained.iter().any(|n| n == name)
    }

    /// `Name = Value` lines in query order, skipping `_`-prefixed names.
    pub fn render(&self) -> String {
        let names: HashMap<VarId, String> = HashMap::new();
        let mut lines: Vec<String> = self
            .bindings
            .iter()
            .filter(|(n, _)| !n.starts_with('_'))
            .map(|(n, t)| format!("{n} = {}", term_to_string_named(t, &names)))
            .collect();
        lines.extend(self.residue.iter().cloned());
        lines.join("\n")
    }
}

pub(crate) fn lin_expr_string(e: &LinExpr) -> String {
    let mut parts: Vec<String> = e
        .coeffs
        .iter()
        .map(|(v, c)| {
            let c = crate::term::Number::from_rational(c.clone());
            format!("{}*_{}", c, v.0)
        })
        .collect();
    if parts.is_empty() || !num_traits::Zero::is_zero(&e.constant) {
        parts.push(crate::term::Number::from_rational(e.constant.clone()).to_string());
    }
    parts.join(" + ")
}

/// Solver configuration shared by queries.
#[derive(Clone, Debug)]
pub struct Machine {
    db: Arc<Database>,
    budget: Budget,
    occurs_check: bool,
    label: LabelStrategy,
    auto_label: bool,
}

impl Machine {
    pub fn new(db: Database) -> Machine {
        Machine::shared(Arc::new(db))
    }

    pub fn shared(db: Arc<Database>) -> Machine {
        Machine {
            db,
            budget: Budget::default(),
            occurs_check: false,
            label: LabelStrategy::default(),
            auto_label: true,
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_occurs_check(mut self, on: bool) -> Self {
        self.occurs_check = on;
        self
    }

    /// Strategy used by `label/1`; `labeling/2` options override it.
    pub fn with_label_strategy(mut self, s: LabelStrategy) -> Self {
        self.label = s;
        self
    }

    /// Whether answers with unlabeled finite-domain variables are labeled
    /// implicitly.
    pub fn with_auto_label(mut self, on: bool) -> Self {
        self.auto_label = on;
        self
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    /// Lazily enumerates the solutions of `query`.
    pub fn solve(&self, query: &Query) -> Solutions {
        let mut st = State::new(self.db.clone(), self.budget);
        st.occurs_check = self.occurs_check;
        st.label = self.label;
        let base = st.b.fresh_block(query.nvars);
        debug_assert_eq!(base, 0);
        st.goals = frame(query.goal.clone(), 0, None);
        Solutions {
            initial: st.marks(),
            st,
            names: query.var_names.clone(),
            started: false,
            done: false,
            auto_label: self.auto_label,
        }
    }

    /// Parses and solves a query string.
    pub fn solve_str(&self, query: &str) -> Result<Solutions, crate::error::SyntaxError> {
        Ok(self.solve(&crate::reader::parse_query(query)?))
    }
}

/// Iterator over query answers. Stops after the first error.
pub struct Solutions {
    st: State,
    initial: (crate::term::BindMark, crate::fd::FdMark, crate::clpr::RMark),
    names: Vec<(String, VarId)>,
    started: bool,
    done: bool,
    auto_label: bool,
}

impl Solutions {
    fn advance(&mut self) -> Result<Option<Solution>, EngineError> {
        let mut found = if self.started {
            self.st.backtrack(0)? && self.st.run(0)?
        } else {
            self.started = true;
            self.st.run(0)?
        };
        let answer_vars: Vec<VarId> = self.names.iter().map(|(_, v)| *v).collect();
        while found {
            let cands = if self.auto_label {
                self.st.autolabel_candidates(&answer_vars)
            } else {
                Vec::new()
            };
            if cands.is_empty() || !self.st.all_finite(&cands) {
                if !cands.is_empty() {
                    log::debug!("answer left with unbounded finite-domain variables");
                }
                break;
            }
            log::debug!("auto-labeling {} variables", cands.len());
            self.st.start_autolabel(&cands);
            found = self.st.run(0)?;
        }
        if !found {
            let (bm, fm, rm) = self.initial.clone();
            self.st.restore(bm, fm, &rm);
            return Ok(None);
        }
        let auto = std::mem::take(&mut self.st.auto_fired);
        if auto {
            self.st.stats.auto_labeled += 1;
        }
        Ok(Some(self.snapshot(auto)))
    }

    fn snapshot(&self, auto_labeled: bool) -> Solution {
        let mut bindings = Vec::new();
        let mut constrained = Vec::new();
        let mut residue = Vec::new();
        let names: HashMap<VarId, String> = self
            .names
            .iter()
            .filter_map(|(n, v)| match self.st.b.deref(&Term::Var(*v)) {
                Term::Var(w) => Some((*w, n.clone())),
                _ => None,
            })
            .collect();
        for (name, v) in &self.names {
            let t = self.st.b.resolve(&Term::Var(*v));
            let mut is_constrained = false;
            for w in t.variables() {
                if let Some(r) = self.st.residue_of(w) {
                    is_constrained = true;
                    let line = match names.get(&w) {
                        Some(n) => r.replacen(&format!("_{}", w.0), n, 1),
                        None => r,
                    };
                    if !residue.contains(&line) {
                        residue.push(line);
                    }
                }
            }
            if is_constrained {
                constrained.push(name.clone());
            }
            bindings.push((name.clone(), t));
        }
        Solution {
            bindings,
            auto_labeled,
            constrained,
            residue,
        }
    }

    /// Text written by output builtins so far.
    pub fn output(&self) -> &str {
        &self.st.out
    }

    pub fn stats(&self) -> SolveStats {
        self.st.stats
    }

    /// True once all choice points are gone and both stores are empty.
    /// After exhaustion this holds for every query.
    pub fn is_pristine(&self) -> bool {
        self.st.is_pristine()
    }

    /// Renders a term with this query's variable names.
    pub fn show(&self, t: &Term) -> String {
        let names: HashMap<VarId, String> = self.names.iter().map(|(n, v)| (*v, n.clone())).collect();
        term_to_string_named(t, &names)
    }
}

impl Iterator for Solutions {
    type Item = Result<Solution, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.advance() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                log::debug!("query aborted: {e}");
                Some(Err(e))
            }
        }
    }
}

/// Convenience: consults `source` and collects every answer to `query`.
pub fn run_all(source: &str, query: &str) -> Result<Vec<Solution>, String> {
    let program = crate::reader::parse_program(source).map_err(|e| e.to_string())?;
    let db = consult(&program).map_err(|e| e.to_string())?;
    let m = Machine::new(db);
    let sols = m.solve_str(query).map_err(|e| e.to_string())?;
    sols.collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())
}
