//! Terms, exact numbers, clauses and variable bindings.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::TermError;

/// Interned atom or functor name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

struct Interner {
    ids: HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        RwLock::new(Interner {
            ids: HashMap::new(),
            names: Vec::new(),
        })
    })
}

impl Sym {
    pub fn new(name: &str) -> Sym {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Sym(id);
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Sym(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Sym(id)
    }

    pub fn as_str(self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Logic variable slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub u32);

/// The universal logic value.
///
/// `Rat` never holds an integral value: constructors route integral
/// rationals to `Int`, so structural equality matches numeric equality
/// for exact numbers. `Float` only arises from inexact functions such as
/// `sqrt` and is never produced by the reader.
#[derive(Clone, PartialEq, Debug)]
pub enum Term {
    Var(VarId),
    Atom(Sym),
    Int(BigInt),
    Rat(BigRational),
    Float(f64),
    Compound(Sym, Arc<[Term]>),
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Sym::new(name))
    }

    pub fn int(v: i64) -> Term {
        Term::Int(BigInt::from(v))
    }

    /// Builds a compound; zero arguments yield an atom.
    pub fn compound(name: &str, args: Vec<Term>) -> Term {
        Term::compound_sym(Sym::new(name), args)
    }

    pub fn compound_sym(name: Sym, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(name)
        } else {
            Term::Compound(name, args.into())
        }
    }

    /// Exact number, collapsing integral rationals to `Int`.
    pub fn rational(r: BigRational) -> Term {
        if r.is_integer() {
            Term::Int(r.to_integer())
        } else {
            Term::Rat(r)
        }
    }

    pub fn nil() -> Term {
        Term::Atom(Sym::new("[]"))
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(Sym::new("."), vec![head, tail].into())
    }

    pub fn list(items: Vec<Term>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn list_with_tail(items: Vec<Term>, tail: Term) -> Term {
        items.into_iter().rev().fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Atom(s) if s.as_str() == "[]")
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Compound(..))
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Term::Int(_) | Term::Rat(_) | Term::Float(_))
    }

    /// Name and arity of a callable term.
    pub fn key(&self) -> Option<(Sym, usize)> {
        match self {
            Term::Atom(s) => Some((*s, 0)),
            Term::Compound(s, args) => Some((*s, args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    /// Checks for a compound with the given name and arity.
    pub fn is_functor(&self, name: &str, arity: usize) -> bool {
        match self {
            Term::Compound(s, args) => args.len() == arity && s.as_str() == name,
            Term::Atom(s) => arity == 0 && s.as_str() == name,
            _ => false,
        }
    }

    /// Walks a list spine without dereferencing. Returns the items and the
    /// final tail (which is `[]` for a proper list).
    pub fn list_items(&self) -> (Vec<&Term>, &Term) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Term::Compound(s, args) = cur {
            if args.len() != 2 || s.as_str() != "." {
                break;
            }
            items.push(&args[0]);
            cur = &args[1];
        }
        (items, cur)
    }

    pub fn is_proper_list(&self) -> bool {
        self.list_items().1.is_nil()
    }

    /// Collects variables in depth-first, left-to-right order without duplicates.
    pub fn variables(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v);
                    }
                }
                Term::Compound(_, args) => stack.extend(args.iter().rev()),
                _ => {}
            }
        }
        out
    }

    /// Shifts every variable by `base`; used to rename clause-local variables.
    pub fn offset_vars(&self, base: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(VarId(v.0 + base)),
            Term::Compound(f, args) => Term::Compound(*f, args.iter().map(|a| a.offset_vars(base)).collect()),
            other => other.clone(),
        }
    }
}

/// Builds a canonical rational, carrying the sign on the numerator.
pub fn rat_normalize(num: BigInt, den: BigInt) -> Result<BigRational, TermError> {
    if den.is_zero() {
        return Err(TermError::ZeroDenominator);
    }
    Ok(BigRational::new(num, den))
}

/// Numeric value produced by arithmetic evaluation.
#[derive(Clone, PartialEq, Debug)]
pub enum Number {
    Int(BigInt),
    Rat(BigRational),
    Float(f64),
}

impl Number {
    pub fn from_rational(r: BigRational) -> Number {
        if r.is_integer() {
            Number::Int(r.to_integer())
        } else {
            Number::Rat(r)
        }
    }

    pub fn from_term(t: &Term) -> Option<Number> {
        match t {
            Term::Int(i) => Some(Number::Int(i.clone())),
            Term::Rat(r) => Some(Number::Rat(r.clone())),
            Term::Float(f) => Some(Number::Float(*f)),
            _ => None,
        }
    }

    pub fn into_term(self) -> Term {
        match self {
            Number::Int(i) => Term::Int(i),
            Number::Rat(r) => Term::rational(r),
            Number::Float(f) => Term::Float(f),
        }
    }

    /// Exact value, if this number is not a float.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Number::Int(i) => Some(BigRational::from_integer(i.clone())),
            Number::Rat(r) => Some(r.clone()),
            Number::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Int(i) => i.to_f64().unwrap_or(f64::NAN),
            Number::Rat(r) => rat_to_f64(r),
            Number::Float(f) => *f,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Number::Float(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Int(i) => i.is_zero(),
            Number::Rat(r) => r.is_zero(),
            Number::Float(f) => *f == 0.0,
        }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge operands before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Int(i) => write!(f, "{i}"),
            Number::Rat(r) => write!(f, "{} rdiv {}", r.numer(), r.denom()),
            Number::Float(x) => write!(f, "{}", crate::write::format_float(*x)),
        }
    }
}

/// A stored program clause. Variables are numbered `0..nvars` and renamed
/// apart on every use.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
    pub nvars: u32,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

/// Position in the binding trail; undoing to a mark restores the prior map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BindMark {
    trail: usize,
    slots: usize,
}

/// Variable bindings plus the trail of bindings made since the last mark.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings {
    slots: Vec<Option<Term>>,
    trail: Vec<VarId>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn fresh(&mut self) -> VarId {
        let id = VarId(self.slots.len() as u32);
        self.slots.push(None);
        id
    }

    /// Allocates `n` consecutive variables and returns the first id.
    pub fn fresh_block(&mut self, n: u32) -> u32 {
        let base = self.slots.len() as u32;
        self.slots.resize(self.slots.len() + n as usize, None);
        base
    }

    pub fn var_count(&self) -> usize {
        self.slots.len()
    }

    pub fn lookup(&self, v: VarId) -> Option<&Term> {
        self.slots.get(v.0 as usize).and_then(|s| s.as_ref())
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.lookup(v).is_some()
    }

    /// Binds an unbound variable and records it on the trail.
    pub fn bind(&mut self, v: VarId, t: Term) {
        let idx = v.0 as usize;
        if idx >= self.slots.len() {
            self.slots.resize(idx + 1, None);
        }
        debug_assert!(self.slots[idx].is_none(), "rebinding {v:?}");
        self.slots[idx] = Some(t);
        self.trail.push(v);
    }

    pub fn mark(&self) -> BindMark {
        BindMark {
            trail: self.trail.len(),
            slots: self.slots.len(),
        }
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    /// Variables bound since trail position `from`, in binding order.
    pub fn trail_since(&self, from: usize) -> &[VarId] {
        &self.trail[from.min(self.trail.len())..]
    }

    pub fn undo_to(&mut self, mark: BindMark) {
        while self.trail.len() > mark.trail {
            let v = self.trail.pop().unwrap();
            if let Some(slot) = self.slots.get_mut(v.0 as usize) {
                *slot = None;
            }
        }
        self.slots.truncate(mark.slots);
    }

    /// Follows the binding chain of `t` to its terminal term. Only the root
    /// is dereferenced.
    pub fn deref<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.lookup(*v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Fully substitutes bound variables throughout `t`.
    pub fn resolve(&self, t: &Term) -> Term {
        self.resolve_acyclic(t, &mut Vec::new())
    }

    // `open` holds the variables whose bindings are being expanded; meeting
    // one again means the binding is cyclic, so it stays a variable.
    fn resolve_acyclic(&self, t: &Term, open: &mut Vec<VarId>) -> Term {
        let mut cur = t;
        let mut entered = 0;
        let out = loop {
            match cur {
                Term::Var(v) if open.contains(v) => break cur.clone(),
                Term::Var(v) => match self.lookup(*v) {
                    Some(next) => {
                        open.push(*v);
                        entered += 1;
                        cur = next;
                    }
                    None => break cur.clone(),
                },
                Term::Compound(f, args) => {
                    break Term::Compound(*f, args.iter().map(|a| self.resolve_acyclic(a, open)).collect())
                }
                other => break other.clone(),
            }
        };
        open.truncate(open.len() - entered);
        out
    }

    /// True iff `v` occurs in the dereferenced expansion of `t`.
    pub fn occurs(&self, v: VarId, t: &Term) -> bool {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match self.deref(t) {
                Term::Var(w) if *w == v => return true,
                Term::Compound(_, args) => stack.extend(args.iter()),
                _ => {}
            }
        }
        false
    }

    /// Unifies two terms. On failure the bindings are left exactly as
    /// they were. Var-var pairs bind the younger variable to the older.
    pub fn unify(&mut self, a: &Term, b: &Term, occurs_check: bool) -> bool {
        let mark = self.mark();
        let ok = self.unify_inner(a, b, occurs_check);
        if !ok {
            self.undo_to(BindMark {
                trail: mark.trail,
                slots: self.slots.len(),
            });
        }
        ok
    }

    fn unify_inner(&mut self, a: &Term, b: &Term, occurs_check: bool) -> bool {
        let mut work: Vec<(Term, Term)> = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = work.pop() {
            let x = self.deref(&x).clone();
            let y = self.deref(&y).clone();
            match (&x, &y) {
                (Term::Var(v), Term::Var(w)) => {
                    if v != w {
                        if v.0 > w.0 {
                            self.bind(*v, y.clone());
                        } else {
                            self.bind(*w, x.clone());
                        }
                    }
                }
                (Term::Var(v), other) | (other, Term::Var(v)) => {
                    if occurs_check && self.occurs(*v, other) {
                        return false;
                    }
                    self.bind(*v, other.clone());
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    for (p, q) in xs.iter().zip(ys.iter()).rev() {
                        work.push((p.clone(), q.clone()));
                    }
                }
                (Term::Float(p), Term::Float(q)) => {
                    if p.to_bits() != q.to_bits() && p != q {
                        return false;
                    }
                }
                _ => {
                    if x != y {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> Term {
        Term::Var(VarId(n))
    }

    #[test]
    fn deref_cases() {
        let mut b = Bindings::new();
        let x = b.fresh();
        let y = b.fresh();
        assert_eq!(b.deref(&Term::Var(x)), &Term::Var(x));
        b.bind(x, Term::Var(y));
        b.bind(y, Term::atom("a"));
        assert_eq!(b.deref(&Term::Var(x)), &Term::atom("a"));

        let mut b = Bindings::new();
        let x = b.fresh();
        let y = b.fresh();
        let fy = Term::compound("f", vec![Term::Var(y)]);
        b.bind(x, fy.clone());
        b.bind(y, Term::int(3));
        // only the root is dereferenced
        assert_eq!(b.deref(&Term::Var(x)), &fy);
    }

    #[test]
    fn rat_normalize_cases() {
        let r = rat_normalize(2.into(), 4.into()).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (1.into(), 2.into()));
        let r = rat_normalize(3.into(), (-6).into()).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), ((-1).into(), 2.into()));
        let r = rat_normalize(0.into(), 7.into()).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (0.into(), 1.into()));
        assert_eq!(rat_normalize(1.into(), 0.into()), Err(TermError::ZeroDenominator));
    }

    #[test]
    fn occurs_cases() {
        let mut b = Bindings::new();
        let x = b.fresh();
        let y = b.fresh();
        assert!(b.occurs(x, &Term::compound("f", vec![v(x.0)])));
        assert!(!b.occurs(x, &Term::compound("f", vec![v(y.0)])));
        b.bind(y, Term::compound("g", vec![v(x.0)]));
        assert!(b.occurs(x, &Term::compound("f", vec![v(y.0)])));
    }

    #[test]
    fn unify_basic() {
        let mut b = Bindings::new();
        let x = b.fresh();
        let y = b.fresh();
        let t1 = Term::compound("f", vec![v(x.0), Term::atom("b")]);
        let t2 = Term::compound("f", vec![Term::atom("a"), v(y.0)]);
        assert!(b.unify(&t1, &t2, false));
        assert_eq!(b.resolve(&v(x.0)), Term::atom("a"));
        assert_eq!(b.resolve(&v(y.0)), Term::atom("b"));

        let mut b = Bindings::new();
        let p1 = Term::compound("point", vec![Term::int(1), Term::int(2)]);
        let p2 = Term::compound("point", vec![Term::int(1), Term::int(3)]);
        let before = b.clone();
        assert!(!b.unify(&p1, &p2, false));
        assert_eq!(b, before);
    }

    #[test]
    fn unify_occurs_check_flag() {
        let mut b = Bindings::new();
        let x = b.fresh();
        let fx = Term::compound("f", vec![v(x.0)]);
        assert!(!b.unify(&v(x.0), &fx, true));
        assert!(!b.is_bound(x));
        assert!(b.unify(&v(x.0), &fx, false));
        assert!(b.is_bound(x));
    }

    #[test]
    fn failed_unify_restores_partial_bindings() {
        let mut b = Bindings::new();
        let x = b.fresh();
        let before = b.clone();
        let t1 = Term::compound("f", vec![v(x.0), Term::int(1)]);
        let t2 = Term::compound("f", vec![Term::int(5), Term::int(2)]);
        assert!(!b.unify(&t1, &t2, false));
        assert_eq!(b, before);
    }

    #[test]
    fn integral_rationals_collapse() {
        let r = rat_normalize(6.into(), 3.into()).unwrap();
        assert_eq!(Term::rational(r), Term::int(2));
    }

    #[test]
    fn list_helpers() {
        let l = Term::list(vec![Term::int(1), Term::int(2)]);
        assert!(l.is_proper_list());
        let (items, tail) = l.list_items();
        assert_eq!(items.len(), 2);
        assert!(tail.is_nil());
        let partial = Term::list_with_tail(vec![Term::int(1)], v(0));
        assert!(!partial.is_proper_list());
    }
}
