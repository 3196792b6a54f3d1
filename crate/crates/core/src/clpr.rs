//! Exact rational linear constraints.
//!
//! Equalities are kept in reduced row-echelon form: every pivot variable
//! has a definition over non-pivot variables only. Inequalities are kept
//! as posted and checked by Fourier–Motzkin elimination after the pivot
//! definitions are substituted in.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::eval_arith;
use crate::error::EngineError;
use crate::term::{Bindings, Number, Term, VarId};
use crate::write::term_to_string;

/// Default cap on stored inequality rows.
pub const INEQ_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

/// `Σ coeffs[x]·x + constant ⋈ 0`. No zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinRow {
    pub coeffs: BTreeMap<VarId, BigRational>,
    pub constant: BigRational,
    pub rel: Rel,
}

/// `Σ coeffs[x]·x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<VarId, BigRational>,
    pub constant: BigRational,
}

impl LinExpr {
    pub fn constant(k: BigRational) -> LinExpr {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: k,
        }
    }

    pub fn var(v: VarId) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, BigRational::one());
        LinExpr {
            coeffs,
            constant: BigRational::zero(),
        }
    }

    pub fn is_const(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(mut self, c: &BigRational) -> LinExpr {
        if c.is_zero() {
            return LinExpr::default();
        }
        for v in self.coeffs.values_mut() {
            *v *= c;
        }
        self.constant *= c;
        self
    }

    /// `self + c·other`.
    pub fn add_scaled(mut self, other: &LinExpr, c: &BigRational) -> LinExpr {
        for (v, a) in &other.coeffs {
            let e = self.coeffs.entry(*v).or_insert_with(BigRational::zero);
            *e += a * c;
            if e.is_zero() {
                self.coeffs.remove(v);
            }
        }
        self.constant += &other.constant * c;
        self
    }

    /// Replaces `v` by `def` wherever it occurs.
    fn substitute(self, v: VarId, def: &LinExpr) -> LinExpr {
        let mut e = self;
        match e.coeffs.remove(&v) {
            Some(c) => e.add_scaled(def, &c),
            None => e,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
struct RInner {
    defs: BTreeMap<VarId, LinExpr>,
    ineqs: Vec<LinRow>,
    vars: BTreeSet<VarId>,
}

/// Restore point for an [`RStore`].
#[derive(Clone, Debug)]
pub struct RMark(Arc<RInner>);

/// Outcome of [`RStore::residue`] when some asked variable is not fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Underdetermined(pub Vec<VarId>);

/// Linear constraint store with copy-on-write snapshots.
#[derive(Clone, Debug, Default)]
pub struct RStore {
    inner: Arc<RInner>,
    cap: usize,
}

impl PartialEq for RStore {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl RStore {
    pub fn new() -> RStore {
        RStore::with_cap(INEQ_CAP)
    }

    pub fn with_cap(cap: usize) -> RStore {
        RStore {
            inner: Arc::default(),
            cap,
        }
    }

    pub fn mark(&self) -> RMark {
        RMark(self.inner.clone())
    }

    pub fn restore(&mut self, mark: &RMark) {
        self.inner = mark.0.clone();
    }

    pub fn is_empty(&self) -> bool {
        self.inner.vars.is_empty()
    }

    /// Whether `v` has taken part in a rational constraint.
    pub fn contains(&self, v: VarId) -> bool {
        self.inner.vars.contains(&v)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.inner.vars.iter().copied()
    }

    /// Pivot definitions, each over non-pivot variables.
    pub fn definitions(&self) -> impl Iterator<Item = (VarId, &LinExpr)> + '_ {
        self.inner.defs.iter().map(|(v, e)| (*v, e))
    }

    pub fn inequalities(&self) -> &[LinRow] {
        &self.inner.ineqs
    }

    /// Value of `v` if its pivot definition is constant.
    pub fn value(&self, v: VarId) -> Option<&BigRational> {
        self.inner.defs.get(&v).filter(|e| e.is_const()).map(|e| &e.constant)
    }

    /// Every variable whose definition is constant.
    pub fn determined(&self) -> Vec<(VarId, BigRational)> {
        self.inner
            .defs
            .iter()
            .filter(|(_, e)| e.is_const())
            .map(|(v, e)| (*v, e.constant.clone()))
            .collect()
    }

    fn reduce(&self, e: LinExpr) -> LinExpr {
        let mut e = e;
        let pivots: Vec<VarId> = e
            .coeffs
            .keys()
            .filter(|v| self.inner.defs.contains_key(v))
            .copied()
            .collect();
        for p in pivots {
            e = e.substitute(p, &self.inner.defs[&p]);
        }
        e
    }

    /// Adds a row. Returns `Ok(false)` on inconsistency, leaving the store
    /// unchanged.
    pub fn post_row(&mut self, row: LinRow) -> Result<bool, EngineError> {
        let before = self.inner.clone();
        let ok = self.post_row_inner(row);
        match ok {
            Ok(true) => Ok(true),
            other => {
                self.inner = before;
                other
            }
        }
    }

    fn post_row_inner(&mut self, row: LinRow) -> Result<bool, EngineError> {
        let expr = LinExpr {
            coeffs: row.coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            constant: row.constant,
        };
        {
            let inner = Arc::make_mut(&mut self.inner);
            inner.vars.extend(expr.coeffs.keys().copied());
        }
        match row.rel {
            Rel::Eq => {
                let e = self.reduce(expr);
                if e.is_const() {
                    return Ok(e.constant.is_zero());
                }
                let (&pivot, c) = e.coeffs.iter().next().unwrap();
                // pivot = -(e - c·pivot) / c
                let inv = -c.recip();
                let mut def = e.clone();
                def.coeffs.remove(&pivot);
                let def = def.scale(&inv);
                let inner = Arc::make_mut(&mut self.inner);
                for d in inner.defs.values_mut() {
                    if d.coeffs.contains_key(&pivot) {
                        *d = std::mem::take(d).substitute(pivot, &def);
                    }
                }
                inner.defs.insert(pivot, def);
                if self.inner.ineqs.is_empty() {
                    Ok(true)
                } else {
                    self.check_ineq()
                }
            }
            rel => {
                if self.inner.ineqs.len() >= self.cap {
                    return Err(EngineError::IneqCapExceeded(self.cap));
                }
                let inner = Arc::make_mut(&mut self.inner);
                inner.ineqs.push(LinRow {
                    coeffs: expr.coeffs,
                    constant: expr.constant,
                    rel,
                });
                self.check_ineq()
            }
        }
    }

    /// Fourier–Motzkin feasibility of the inequality rows under the
    /// current pivot definitions.
    pub fn check_ineq(&self) -> Result<bool, EngineError> {
        if self.inner.ineqs.len() > self.cap {
            return Err(EngineError::IneqCapExceeded(self.cap));
        }
        let mut rows: Vec<(LinExpr, bool)> = self
            .inner
            .ineqs
            .iter()
            .map(|r| {
                let e = self.reduce(LinExpr {
                    coeffs: r.coeffs.clone(),
                    constant: r.constant.clone(),
                });
                (e, r.rel == Rel::Lt)
            })
            .collect();
        loop {
            // constant rows: k ≤ 0 or k < 0
            let mut open = Vec::with_capacity(rows.len());
            for (e, strict) in rows {
                if e.is_const() {
                    let ok = if strict {
                        e.constant.is_negative()
                    } else {
                        !e.constant.is_positive()
                    };
                    if !ok {
                        return Ok(false);
                    }
                } else {
                    open.push((e, strict));
                }
            }
            let Some(x) = open.iter().flat_map(|(e, _)| e.coeffs.keys()).min().copied() else {
                return Ok(true);
            };
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
            for (e, s) in open {
                match e.coeffs.get(&x) {
                    Some(c) if c.is_positive() => pos.push((e, s)),
                    Some(_) => neg.push((e, s)),
                    None => rest.push((e, s)),
                }
            }
            for (p, ps) in &pos {
                for (n, ns) in &neg {
                    let cp = p.coeffs[&x].clone();
                    let cn = -n.coeffs[&x].clone();
                    let combined = p.clone().scale(&cn).add_scaled(n, &cp);
                    rest.push((combined, *ps || *ns));
                }
            }
            rows = rest;
        }
    }

    /// Exact values of `vars`, or the free variables blocking them.
    pub fn residue(&self, vars: &[VarId]) -> Result<BTreeMap<VarId, BigRational>, Underdetermined> {
        let mut out = BTreeMap::new();
        let mut free = BTreeSet::new();
        for &v in vars {
            match self.inner.defs.get(&v) {
                Some(e) if e.is_const() => {
                    out.insert(v, e.constant.clone());
                }
                Some(e) => {
                    free.insert(v);
                    free.extend(e.coeffs.keys().copied());
                }
                None => {
                    free.insert(v);
                    for (p, e) in &self.inner.defs {
                        if e.coeffs.contains_key(&v) {
                            free.insert(*p);
                            free.extend(e.coeffs.keys().copied());
                        }
                    }
                }
            }
        }
        if free.is_empty() {
            Ok(out)
        } else {
            Err(Underdetermined(free.into_iter().collect()))
        }
    }
}

/// Relation names accepted inside `{...}` blocks and for routed `#` goals.
pub fn r_relation(name: &str) -> Option<(Rel, bool)> {
    // (relation, swap sides)
    Some(match name {
        "=" | "=:=" | "#=" => (Rel::Eq, false),
        "=<" | "#=<" => (Rel::Le, false),
        "<" | "#<" => (Rel::Lt, false),
        ">=" | "#>=" => (Rel::Le, true),
        ">" | "#>" => (Rel::Lt, true),
        _ => return None,
    })
}

fn exact(n: Number, t: &Term) -> Result<BigRational, EngineError> {
    n.to_rational()
        .ok_or_else(|| EngineError::type_error("exact number", term_to_string(t)))
}

/// Linearizes an arithmetic expression over rationals.
pub fn r_linearize(t: &Term, b: &Bindings) -> Result<LinExpr, EngineError> {
    let t = b.deref(t);
    match t {
        Term::Var(v) => return Ok(LinExpr::var(*v)),
        Term::Int(_) | Term::Rat(_) | Term::Float(_) => {
            let n = Number::from_term(t).unwrap();
            return Ok(LinExpr::constant(exact(n, t)?));
        }
        Term::Atom(_) => return Ok(LinExpr::constant(exact(eval_arith(t, b)?, t)?)),
        Term::Compound(..) => {}
    }
    let name = t.key().map(|(f, _)| f.as_str()).unwrap_or("");
    let args = t.args();
    let nonlinear = || EngineError::NonLinearUnsupported(term_to_string(&b.resolve(t)));
    match (name, args.len()) {
        ("+", 2) => Ok(r_linearize(&args[0], b)?.add_scaled(&r_linearize(&args[1], b)?, &BigRational::one())),
        ("-", 2) => Ok(r_linearize(&args[0], b)?.add_scaled(&r_linearize(&args[1], b)?, &-BigRational::one())),
        ("-", 1) => Ok(r_linearize(&args[0], b)?.scale(&-BigRational::one())),
        ("+", 1) => r_linearize(&args[0], b),
        ("*", 2) => {
            let l = r_linearize(&args[0], b)?;
            let r = r_linearize(&args[1], b)?;
            if l.is_const() {
                Ok(r.scale(&l.constant))
            } else if r.is_const() {
                Ok(l.scale(&r.constant))
            } else {
                Err(nonlinear())
            }
        }
        ("/", 2) => {
            let l = r_linearize(&args[0], b)?;
            let r = r_linearize(&args[1], b)?;
            if !r.is_const() {
                return Err(nonlinear());
            }
            if r.constant.is_zero() {
                return Err(EngineError::ZeroDivisor);
            }
            Ok(l.scale(&r.constant.recip()))
        }
        _ => {
            if t.variables().iter().all(|v| b.is_bound(*v)) || is_ground(t, b) {
                Ok(LinExpr::constant(exact(eval_arith(t, b)?, t)?))
            } else {
                Err(nonlinear())
            }
        }
    }
}

fn is_ground(t: &Term, b: &Bindings) -> bool {
    match b.deref(t) {
        Term::Var(_) => false,
        Term::Compound(_, args) => args.iter().all(|a| is_ground(a, b)),
        _ => true,
    }
}

/// Rows for one relation goal, or a conjunction of them.
pub fn r_rows(goal: &Term, b: &Bindings) -> Result<Vec<LinRow>, EngineError> {
    let goal = b.deref(goal);
    if goal.is_functor(",", 2) {
        let mut rows = r_rows(&goal.args()[0], b)?;
        rows.extend(r_rows(&goal.args()[1], b)?);
        return Ok(rows);
    }
    if goal.is_functor("{}", 1) {
        return r_rows(&goal.args()[0], b);
    }
    let (rel, swap) = match goal {
        Term::Compound(f, args) if args.len() == 2 => r_relation(f.as_str())
            .ok_or_else(|| EngineError::type_error("linear relation", term_to_string(&b.resolve(goal))))?,
        Term::Var(_) => return Err(EngineError::Instantiation("constraint".into())),
        other => {
            return Err(EngineError::type_error(
                "linear relation",
                term_to_string(&b.resolve(other)),
            ))
        }
    };
    let (l, r) = (&goal.args()[0], &goal.args()[1]);
    let (l, r) = if swap { (r, l) } else { (l, r) };
    let e = r_linearize(l, b)?.add_scaled(&r_linearize(r, b)?, &-BigRational::one());
    Ok(vec![LinRow {
        coeffs: e.coeffs,
        constant: e.constant,
        rel,
    }])
}

/// Posts a relation (or `{...}` block) to the store. `Ok(false)` means
/// inconsistency; the store is then unchanged.
pub fn r_post(goal: &Term, b: &Bindings, store: &mut RStore) -> Result<bool, EngineError> {
    let rows = r_rows(goal, b)?;
    let mark = store.mark();
    for row in rows {
        match store.post_row(row) {
            Ok(true) => {}
            other => {
                store.restore(&mark);
                return other;
            }
        }
    }
    Ok(true)
}
