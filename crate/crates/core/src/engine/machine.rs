use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::builtins::{self, Builtin};
use super::db::Database;
use super::Budget;
use crate::clpr::{r_post, LinRow, RMark, RStore, Rel};
use crate::error::{BudgetKind, EngineError};
use crate::fd::{fd_post, FdConstraint, FdMark, FdStore, LabelStrategy, ValueOrder, VarSelect, FD_LIMIT};
use crate::term::{BindMark, Bindings, Clause, Number, Term, VarId};
use crate::write::term_to_string;

/// One pending goal. `cutb` is the choice-stack height a `!` in this goal
/// cuts back to.
pub(crate) struct Frame {
    pub goal: Term,
    pub cutb: usize,
    pub next: Cont,
}

pub(crate) type Cont = Option<Rc<Frame>>;

pub(crate) fn frame(goal: Term, cutb: usize, next: Cont) -> Cont {
    Some(Rc::new(Frame { goal, cutb, next }))
}

enum Alt {
    Clauses {
        goal: Term,
        clauses: Arc<[Clause]>,
        next: usize,
        cont: Cont,
    },
    Goals(Cont),
}

struct Choice {
    bmark: BindMark,
    fdmark: FdMark,
    rmark: RMark,
    alt: Alt,
}

/// Counters describing one solve run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub steps: u64,
    /// `#` goals handled by the finite-domain solver.
    pub fd_routed: u64,
    /// `#` goals and `{}` blocks handled by the rational solver.
    pub r_routed: u64,
    /// Solutions whose finite-domain variables were labeled implicitly.
    pub auto_labeled: u64,
}

/// Complete mutable state of one query.
pub(crate) struct State {
    pub db: Arc<Database>,
    pub b: Bindings,
    pub fd: FdStore,
    pub r: RStore,
    pub goals: Cont,
    choices: Vec<Choice>,
    budget: Budget,
    start: Instant,
    pub occurs_check: bool,
    pub label: LabelStrategy,
    pub out: String,
    pub auto_fired: bool,
    r_dirty: bool,
    pub stats: SolveStats,
}

const TIME_CHECK_INTERVAL: u64 = 1024;

fn may_match(goal_arg: &Term, head_arg: &Term) -> bool {
    match (goal_arg, head_arg) {
        (Term::Var(_), _) | (_, Term::Var(_)) => true,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => f == g && xs.len() == ys.len(),
        (Term::Compound(..), _) | (_, Term::Compound(..)) => false,
        (a, b) => a == b,
    }
}

impl State {
    pub fn new(db: Arc<Database>, budget: Budget) -> State {
        State {
            db,
            b: Bindings::new(),
            fd: FdStore::new(),
            r: RStore::new(),
            goals: None,
            choices: Vec::new(),
            budget,
            start: Instant::now(),
            occurs_check: false,
            label: LabelStrategy::default(),
            out: String::new(),
            auto_fired: false,
            r_dirty: false,
            stats: SolveStats::default(),
        }
    }

    pub fn height(&self) -> usize {
        self.choices.len()
    }

    pub fn push_goal(&mut self, goal: Term, cutb: usize) {
        self.goals = frame(goal, cutb, self.goals.take());
    }

    /// Records an alternative that resumes with `cont`.
    pub fn push_alt(&mut self, cont: Cont) {
        self.choices.push(Choice {
            bmark: self.b.mark(),
            fdmark: self.fd.mark(),
            rmark: self.r.mark(),
            alt: Alt::Goals(cont),
        });
    }

    fn cut_to(&mut self, height: usize) {
        self.choices.truncate(height);
    }

    fn tick(&mut self) -> Result<(), EngineError> {
        self.stats.steps += 1;
        if self.stats.steps > self.budget.max_steps {
            return Err(EngineError::BudgetExceeded(BudgetKind::Steps));
        }
        if self.stats.steps.is_multiple_of(TIME_CHECK_INTERVAL) && self.start.elapsed() > self.budget.timeout {
            return Err(EngineError::BudgetExceeded(BudgetKind::Time));
        }
        Ok(())
    }

    /// Runs until the goal list is empty (`true`) or no choice point above
    /// `base` remains (`false`).
    pub fn run(&mut self, base: usize) -> Result<bool, EngineError> {
        loop {
            self.tick()?;
            let Some(f) = self.goals.take() else {
                return Ok(true);
            };
            self.goals = f.next.clone();
            if !self.step(&f.goal, f.cutb)? && !self.backtrack(base)? {
                return Ok(false);
            }
        }
    }

    /// Resumes the newest alternative above `base`.
    pub fn backtrack(&mut self, base: usize) -> Result<bool, EngineError> {
        while self.choices.len() > base {
            let ch = self.choices.pop().unwrap();
            self.restore(ch.bmark, ch.fdmark, &ch.rmark);
            match ch.alt {
                Alt::Goals(cont) => {
                    self.goals = cont;
                    return Ok(true);
                }
                Alt::Clauses {
                    goal,
                    clauses,
                    next,
                    cont,
                } => {
                    if self.try_clauses(&goal, clauses, next, cont)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    pub fn marks(&self) -> (BindMark, FdMark, RMark) {
        (self.b.mark(), self.fd.mark(), self.r.mark())
    }

    pub fn restore(&mut self, bm: BindMark, fm: FdMark, rm: &RMark) {
        self.b.undo_to(bm);
        self.fd.restore(fm);
        self.r.restore(rm);
        self.r_dirty = false;
    }

    /// Runs `goal` in isolation, calling `each` per solution until it
    /// returns false. Bindings of the last visited solution are left in
    /// place; callers restore their own marks.
    pub fn sub_run(
        &mut self,
        goal: Term,
        mut each: impl FnMut(&mut State) -> Result<bool, EngineError>,
    ) -> Result<(), EngineError> {
        let saved = self.goals.take();
        let base = self.choices.len();
        self.goals = frame(goal, base, None);
        let mut found = self.run(base)?;
        while found {
            if !each(self)? {
                break;
            }
            found = self.backtrack(base)? && self.run(base)?;
        }
        self.choices.truncate(base);
        self.goals = saved;
        Ok(())
    }

    fn try_clauses(
        &mut self,
        goal: &Term,
        clauses: Arc<[Clause]>,
        start: usize,
        cont: Cont,
    ) -> Result<bool, EngineError> {
        let first = goal.args().first().map(|a| self.b.deref(a).clone());
        let candidate = |from: usize| {
            (from..clauses.len()).find(|&i| match (&first, clauses[i].head.args().first()) {
                (Some(g), Some(h)) => may_match(g, h),
                _ => true,
            })
        };
        let mut i = candidate(start);
        while let Some(ci) = i {
            let next = candidate(ci + 1);
            let height = self.choices.len();
            let (bm, fm, rm) = self.marks();
            if let Some(n) = next {
                self.choices.push(Choice {
                    bmark: bm,
                    fdmark: fm,
                    rmark: rm.clone(),
                    alt: Alt::Clauses {
                        goal: goal.clone(),
                        clauses: clauses.clone(),
                        next: n,
                        cont: cont.clone(),
                    },
                });
            }
            let clause = &clauses[ci];
            let base = self.b.fresh_block(clause.nvars);
            let head = clause.head.offset_vars(base);
            let from = self.b.trail_len();
            if self.b.unify(goal, &head, self.occurs_check) && self.settle(from)? {
                self.goals = cont;
                for g in clause.body.iter().rev() {
                    self.push_goal(g.offset_vars(base), height);
                }
                return Ok(true);
            }
            if next.is_some() {
                self.choices.pop();
            }
            self.restore(bm, fm, &rm);
            i = next;
        }
        Ok(false)
    }

    /// Unifies and runs the constraint hooks for every new binding.
    pub fn unify(&mut self, a: &Term, b: &Term) -> Result<bool, EngineError> {
        let from = self.b.trail_len();
        if !self.b.unify(a, b, self.occurs_check) {
            return Ok(false);
        }
        self.settle(from)
    }

    /// Propagates bindings made since trail position `from` into the
    /// constraint stores and binds variables the stores have fixed, until
    /// neither side has news.
    pub fn settle(&mut self, from: usize) -> Result<bool, EngineError> {
        let mut pos = from;
        loop {
            for v in self.fd.take_changed() {
                if let Some(val) = self.fd.domain(v).and_then(|d| d.value()) {
                    if let Term::Var(w) = *self.b.deref(&Term::Var(v)) {
                        self.b.bind(w, Term::Int(val.into()));
                    }
                }
            }
            if std::mem::take(&mut self.r_dirty) {
                for (v, val) in self.r.determined() {
                    if let Term::Var(w) = *self.b.deref(&Term::Var(v)) {
                        self.b.bind(w, Number::from_rational(val).into_term());
                    }
                }
            }
            let bound: Vec<VarId> = self.b.trail_since(pos).to_vec();
            pos = self.b.trail_len();
            if bound.is_empty() {
                return Ok(true);
            }
            for v in bound {
                if !self.attr_hook(v)? {
                    return Ok(false);
                }
            }
        }
    }

    fn attr_hook(&mut self, v: VarId) -> Result<bool, EngineError> {
        let in_fd = self.fd.contains(v);
        let in_r = self.r.contains(v);
        if !in_fd && !in_r {
            return Ok(true);
        }
        let t = self.b.deref(&Term::Var(v)).clone();
        if in_fd {
            return match t {
                Term::Int(i) => match i.to_i64().filter(|x| x.abs() <= FD_LIMIT) {
                    Some(x) => Ok(self.fd.fix(v, x)),
                    None => Ok(false),
                },
                Term::Var(w) => {
                    if self.r.contains(w) {
                        return Err(EngineError::TypeMix(format!("_{}", w.0)));
                    }
                    self.fd.post(FdConstraint::LinEq(vec![(1, v), (-1, w)], 0))
                }
                Term::Rat(_) | Term::Float(_) => Ok(false),
                other => Err(EngineError::type_error("integer", term_to_string(&other))),
            };
        }
        let mut coeffs = std::collections::BTreeMap::new();
        coeffs.insert(v, BigRational::from_integer(1.into()));
        let constant = match t {
            Term::Var(w) => {
                if self.fd.contains(w) {
                    return Err(EngineError::TypeMix(format!("_{}", w.0)));
                }
                coeffs.insert(w, BigRational::from_integer((-1).into()));
                BigRational::from_integer(0.into())
            }
            Term::Int(_) | Term::Rat(_) => -Number::from_term(&t).unwrap().to_rational().unwrap(),
            Term::Float(f) => match BigRational::from_float(f) {
                Some(r) => -r,
                None => return Ok(false),
            },
            other => return Err(EngineError::type_error("number", term_to_string(&other))),
        };
        self.r_dirty = true;
        self.r.post_row(LinRow {
            coeffs,
            constant,
            rel: Rel::Eq,
        })
    }

    /// Unbound variable roots reachable in `t`.
    pub fn free_vars(&self, t: &Term) -> Vec<VarId> {
        self.b.resolve(t).variables()
    }

    fn has_rational_shape(&self, t: &Term) -> bool {
        match self.b.deref(t) {
            Term::Rat(_) | Term::Float(_) => true,
            Term::Compound(f, args) => {
                (f.as_str() == "/" && args.len() == 2) || args.iter().any(|a| self.has_rational_shape(a))
            }
            _ => false,
        }
    }

    /// Routes a `#` relation to the finite-domain or the rational solver.
    pub fn post_hash(&mut self, goal: &Term) -> Result<bool, EngineError> {
        let vars = self.free_vars(goal);
        let any_r = vars.iter().any(|v| self.r.contains(*v));
        let any_fd = vars.iter().any(|v| self.fd.contains(*v));
        let from = self.b.trail_len();
        if any_r || self.has_rational_shape(goal) {
            if any_fd {
                let v = vars.iter().find(|v| self.fd.contains(**v)).unwrap();
                return Err(EngineError::TypeMix(format!("_{}", v.0)));
            }
            if goal.is_functor("#\\=", 2) {
                return Err(EngineError::type_error(
                    "rational relation (=, <, =<, >, >=)",
                    term_to_string(&self.b.resolve(goal)),
                ));
            }
            log::debug!("routed to rational solver: {}", term_to_string(&self.b.resolve(goal)));
            self.stats.r_routed += 1;
            self.r_dirty = true;
            if !r_post(goal, &self.b, &mut self.r)? {
                return Ok(false);
            }
        } else {
            self.stats.fd_routed += 1;
            if !fd_post(goal, &mut self.b, &mut self.fd)? {
                return Ok(false);
            }
        }
        self.settle(from)
    }

    /// Posts a `{...}` block.
    pub fn post_braces(&mut self, inner: &Term) -> Result<bool, EngineError> {
        if let Some(v) = self.free_vars(inner).into_iter().find(|v| self.fd.contains(*v)) {
            return Err(EngineError::TypeMix(format!("_{}", v.0)));
        }
        let from = self.b.trail_len();
        self.stats.r_routed += 1;
        self.r_dirty = true;
        if !r_post(inner, &self.b, &mut self.r)? {
            return Ok(false);
        }
        self.settle(from)
    }

    /// One labeling step over `vars`: fix the selected variable to its
    /// first value and leave the exclusion of that value as alternative.
    fn label_step(&mut self, goal: &Term) -> Result<bool, EngineError> {
        let args = goal.args();
        let list = self.b.resolve(&args[0]);
        if !list.is_proper_list() {
            return Err(EngineError::Instantiation("labeling list".into()));
        }
        let select = match self.b.deref(&args[1]) {
            Term::Atom(s) if s.as_str() == "ff" => VarSelect::FirstFail,
            _ => VarSelect::Leftmost,
        };
        let order = match self.b.deref(&args[2]) {
            Term::Atom(s) if s.as_str() == "down" => ValueOrder::Descending,
            _ => ValueOrder::Ascending,
        };
        let mut vars = Vec::new();
        for item in list.list_items().0 {
            match item {
                Term::Var(v) => {
                    match self.fd.domain(*v) {
                        None => return Err(EngineError::Instantiation("label/1 variable without a domain".into())),
                        Some(d) if !d.is_finite() => return Err(EngineError::UnboundedDomain),
                        Some(_) => {}
                    }
                    vars.push(*v);
                }
                Term::Int(_) => {}
                other => return Err(EngineError::type_error("integer", term_to_string(other))),
            }
        }
        let Some(v) = self.fd.select_var(&vars, select) else {
            return Ok(true);
        };
        let d = self.fd.domain(v).unwrap();
        let val = match order {
            ValueOrder::Ascending => d.min(),
            ValueOrder::Descending => d.max(),
        };
        let again = frame(goal.clone(), 0, self.goals.clone());
        let excl = Term::compound("$label_excl", vec![Term::Var(v), Term::int(val)]);
        self.push_alt(frame(excl, 0, again));
        self.push_goal(goal.clone(), 0);
        self.unify(&Term::Var(v), &Term::int(val))
    }

    fn label_exclude(&mut self, args: &[Term]) -> Result<bool, EngineError> {
        let (Term::Var(v), Term::Int(val)) = (self.b.deref(&args[0]).clone(), &args[1]) else {
            return Ok(true);
        };
        let from = self.b.trail_len();
        if !self.fd.exclude(v, val.to_i64().unwrap()) {
            return Ok(false);
        }
        self.settle(from)
    }

    fn call_n(&mut self, args: &[Term]) -> Result<Term, EngineError> {
        let g = self.b.deref(&args[0]).clone();
        let extra = &args[1..];
        Ok(match g {
            Term::Var(_) => return Err(EngineError::Instantiation("call/N".into())),
            Term::Atom(s) if extra.is_empty() => Term::Atom(s),
            Term::Atom(s) => Term::compound_sym(s, extra.to_vec()),
            Term::Compound(f, a) => {
                let mut all = a.to_vec();
                all.extend_from_slice(extra);
                Term::compound_sym(f, all)
            }
            other => return Err(EngineError::type_error("callable", term_to_string(&other))),
        })
    }

    fn findall(&mut self, template: &Term, goal: &Term, result: &Term) -> Result<bool, EngineError> {
        let (bm, fm, rm) = self.marks();
        let mut items = Vec::new();
        let template = template.clone();
        self.sub_run(goal.clone(), |st| {
            items.push(st.b.resolve(&template));
            Ok(true)
        })?;
        self.restore(bm, fm, &rm);
        let list = self.rename_fresh(&Term::list(items));
        self.unify(&list, result)
    }

    /// Copies `t`, replacing every unbound variable with a new one.
    pub fn rename_fresh(&mut self, t: &Term) -> Term {
        let t = self.b.resolve(t);
        let vars = t.variables();
        if vars.is_empty() {
            return t;
        }
        let map: Vec<(VarId, VarId)> = vars.into_iter().map(|v| (v, self.b.fresh())).collect();
        fn sub(t: &Term, map: &[(VarId, VarId)]) -> Term {
            match t {
                Term::Var(v) => Term::Var(map.iter().find(|(a, _)| a == v).map_or(*v, |(_, b)| *b)),
                Term::Compound(f, args) => Term::Compound(*f, args.iter().map(|a| sub(a, map)).collect()),
                other => other.clone(),
            }
        }
        sub(&t, &map)
    }

    fn if_then_else(&mut self, cond: &Term, then: &Term, els: Option<&Term>, cutb: usize) {
        let h = self.height();
        let else_goal = els.cloned().unwrap_or_else(|| Term::atom("fail"));
        self.push_alt(frame(else_goal, cutb, self.goals.clone()));
        self.push_goal(then.clone(), cutb);
        self.push_goal(Term::compound("$cut", vec![Term::int(h as i64)]), cutb);
        self.push_goal(cond.clone(), h + 1);
    }

    /// Executes one goal. `Ok(false)` requests backtracking.
    fn step(&mut self, goal: &Term, cutb: usize) -> Result<bool, EngineError> {
        let goal = self.b.deref(goal).clone();
        let (name, arity) = match &goal {
            Term::Var(_) => return Err(EngineError::Instantiation("goal".into())),
            Term::Atom(s) => (s.as_str(), 0),
            Term::Compound(f, a) => (f.as_str(), a.len()),
            other => return Err(EngineError::type_error("callable", term_to_string(other))),
        };
        let args = goal.args();
        match (name, arity) {
            ("true", 0) => return Ok(true),
            ("fail", 0) | ("false", 0) => return Ok(false),
            ("!", 0) => {
                self.cut_to(cutb);
                return Ok(true);
            }
            ("$cut", 1) => {
                if let Term::Int(h) = &args[0] {
                    self.cut_to(h.to_usize().unwrap_or(0));
                }
                return Ok(true);
            }
            (",", 2) => {
                self.push_goal(args[1].clone(), cutb);
                self.push_goal(args[0].clone(), cutb);
                return Ok(true);
            }
            (";", 2) => {
                let left = self.b.deref(&args[0]).clone();
                if left.is_functor("->", 2) {
                    self.if_then_else(&left.args()[0], &left.args()[1], Some(&args[1]), cutb);
                } else {
                    self.push_alt(frame(args[1].clone(), cutb, self.goals.clone()));
                    self.push_goal(left, cutb);
                }
                return Ok(true);
            }
            ("->", 2) => {
                self.if_then_else(&args[0], &args[1], None, cutb);
                return Ok(true);
            }
            ("\\+", 1) | ("not", 1) => {
                let (bm, fm, rm) = self.marks();
                let mut found = false;
                self.sub_run(args[0].clone(), |_| {
                    found = true;
                    Ok(false)
                })?;
                self.restore(bm, fm, &rm);
                return Ok(!found);
            }
            ("call", n) if n >= 1 => {
                let g = self.call_n(args)?;
                let h = self.height();
                self.push_goal(g, h);
                return Ok(true);
            }
            ("findall", 3) => return self.findall(&args[0], &args[1], &args[2]),
            ("$label", 3) => return self.label_step(&goal),
            ("$label_excl", 2) => return self.label_exclude(args),
            ("$auto_mark", 0) => {
                self.auto_fired = true;
                return Ok(true);
            }
            _ => {}
        }
        if let Some(f) = builtins::lookup(name, arity) {
            return self.call_builtin(f, args);
        }
        let key = goal.key().unwrap();
        match self.db.clauses(key.0, key.1).cloned() {
            Some(clauses) => {
                let cont = self.goals.take();
                self.try_clauses(&goal, clauses, 0, cont)
            }
            None if self.db.is_declared(key.0, key.1) => Ok(false),
            None => Err(EngineError::Existence {
                name: name.to_owned(),
                arity,
            }),
        }
    }

    fn call_builtin(&mut self, f: Builtin, args: &[Term]) -> Result<bool, EngineError> {
        let from = self.b.trail_len();
        if !f(self, args)? {
            return Ok(false);
        }
        self.settle(from)
    }

    /// Unbound finite-domain variables that an answer depends on: those in
    /// the answer terms first, then the rest of their propagator component
    /// by variable id.
    pub fn autolabel_candidates(&self, answer_vars: &[VarId]) -> Vec<VarId> {
        let mut seeds = Vec::new();
        for v in answer_vars {
            for w in self.free_vars(&Term::Var(*v)) {
                if self.fd.contains(w) && !seeds.contains(&w) {
                    seeds.push(w);
                }
            }
        }
        let comp = self.fd.component(&seeds);
        let open = |v: &VarId| {
            matches!(self.b.deref(&Term::Var(*v)), Term::Var(w) if w == v)
                && self.fd.domain(*v).is_some_and(|d| d.value().is_none())
        };
        let mut out: Vec<VarId> = seeds.iter().copied().filter(open).collect();
        let mut rest: Vec<VarId> = comp.into_iter().filter(|v| !seeds.contains(v)).filter(open).collect();
        rest.sort();
        out.extend(rest);
        out
    }

    pub fn all_finite(&self, vars: &[VarId]) -> bool {
        vars.iter().all(|v| self.fd.domain(*v).is_some_and(|d| d.is_finite()))
    }

    pub fn start_autolabel(&mut self, vars: &[VarId]) {
        let list = Term::list(vars.iter().map(|v| Term::Var(*v)).collect());
        self.goals = frame(Term::atom("$auto_mark"), 0, None);
        self.push_goal(
            Term::compound("$label", vec![list, Term::atom("leftmost"), Term::atom("up")]),
            0,
        );
    }

    /// Human-readable residual constraint on `v`, if any.
    pub fn residue_of(&self, v: VarId) -> Option<String> {
        if let Some(d) = self.fd.domain(v) {
            return Some(format!("_{} in {}", v.0, d));
        }
        if self.r.contains(v) {
            if let Some((_, e)) = self.r.definitions().find(|(p, _)| *p == v) {
                return Some(format!("{{_{} = {}}}", v.0, super::lin_expr_string(e)));
            }
            return Some(format!("{{_{} free}}", v.0));
        }
        None
    }

    pub fn default_strategy_term(&self) -> (Term, Term) {
        let sel = match self.label.select {
            VarSelect::FirstFail => "ff",
            VarSelect::Leftmost => "leftmost",
        };
        let ord = match self.label.order {
            ValueOrder::Ascending => "up",
            ValueOrder::Descending => "down",
        };
        (Term::atom(sel), Term::atom(ord))
    }

    pub fn is_pristine(&self) -> bool {
        self.choices.is_empty() && self.fd.is_empty() && self.r.is_empty()
    }
}
