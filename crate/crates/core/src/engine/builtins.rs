//! Natively implemented predicates. These cannot be redefined.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::machine::State;
use crate::arith::{compare_numbers, eval_arith};
use crate::error::EngineError;
use crate::fd::fd_in;
use crate::term::{Number, Term};
use crate::write::{format_float, term_to_string, term_to_string_unquoted};

pub(crate) type Builtin = fn(&mut State, &[Term]) -> Result<bool, EngineError>;

/// Control constructs interpreted directly by the solve loop.
const CONTROL: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("false", 0),
    ("!", 0),
    (",", 2),
    (";", 2),
    ("->", 2),
    ("\\+", 1),
    ("not", 1),
    ("call", 1),
    ("call", 2),
    ("call", 3),
    ("call", 4),
    ("call", 5),
    ("call", 6),
    ("call", 7),
    ("call", 8),
    ("findall", 3),
    ("$cut", 1),
    ("$label", 3),
    ("$label_excl", 2),
    ("$auto_mark", 0),
];

fn table() -> &'static HashMap<(&'static str, usize), Builtin> {
    static TABLE: OnceLock<HashMap<(&'static str, usize), Builtin>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let entries: &[(&str, usize, Builtin)] = &[
            ("=", 2, |st, a| st.unify(&a[0], &a[1])),
            ("\\=", 2, not_unifiable),
            ("unify_with_occurs_check", 2, |st, a| {
                let from = st.b.trail_len();
                Ok(st.b.unify(&a[0], &a[1], true) && st.settle(from)?)
            }),
            ("==", 2, |st, a| Ok(st.compare(&a[0], &a[1]) == Ordering::Equal)),
            ("\\==", 2, |st, a| Ok(st.compare(&a[0], &a[1]) != Ordering::Equal)),
            ("@<", 2, |st, a| Ok(st.compare(&a[0], &a[1]) == Ordering::Less)),
            ("@>", 2, |st, a| Ok(st.compare(&a[0], &a[1]) == Ordering::Greater)),
            ("@=<", 2, |st, a| Ok(st.compare(&a[0], &a[1]) != Ordering::Greater)),
            ("@>=", 2, |st, a| Ok(st.compare(&a[0], &a[1]) != Ordering::Less)),
            ("compare", 3, compare3),
            ("is", 2, |st, a| {
                let v = eval_arith(&a[1], &st.b)?.into_term();
                st.unify(&a[0], &v)
            }),
            ("=:=", 2, |st, a| arith_cmp(st, a, |o| o == Ordering::Equal)),
            ("=\\=", 2, |st, a| arith_cmp(st, a, |o| o != Ordering::Equal)),
            ("<", 2, |st, a| arith_cmp(st, a, |o| o == Ordering::Less)),
            (">", 2, |st, a| arith_cmp(st, a, |o| o == Ordering::Greater)),
            ("=<", 2, |st, a| arith_cmp(st, a, |o| o != Ordering::Greater)),
            (">=", 2, |st, a| arith_cmp(st, a, |o| o != Ordering::Less)),
            ("var", 1, |st, a| Ok(matches!(st.b.deref(&a[0]), Term::Var(_)))),
            ("nonvar", 1, |st, a| Ok(!matches!(st.b.deref(&a[0]), Term::Var(_)))),
            ("atom", 1, |st, a| Ok(matches!(st.b.deref(&a[0]), Term::Atom(_)))),
            ("number", 1, |st, a| Ok(st.b.deref(&a[0]).is_number())),
            ("integer", 1, |st, a| Ok(matches!(st.b.deref(&a[0]), Term::Int(_)))),
            ("float", 1, |st, a| Ok(matches!(st.b.deref(&a[0]), Term::Float(_)))),
            ("rational", 1, |st, a| {
                Ok(matches!(st.b.deref(&a[0]), Term::Int(_) | Term::Rat(_)))
            }),
            ("atomic", 1, |st, a| {
                Ok(!matches!(st.b.deref(&a[0]), Term::Var(_) | Term::Compound(..)))
            }),
            ("compound", 1, |st, a| {
                Ok(matches!(st.b.deref(&a[0]), Term::Compound(..)))
            }),
            ("callable", 1, |st, a| Ok(st.b.deref(&a[0]).is_callable())),
            ("is_list", 1, |st, a| Ok(st.b.resolve(&a[0]).is_proper_list())),
            ("ground", 1, |st, a| Ok(st.b.resolve(&a[0]).variables().is_empty())),
            ("functor", 3, functor),
            ("arg", 3, arg),
            ("=..", 2, univ),
            ("copy_term", 2, |st, a| {
                let c = st.rename_fresh(&a[0]);
                st.unify(&c, &a[1])
            }),
            ("length", 2, length),
            ("msort", 2, |st, a| sort_list(st, a, false)),
            ("sort", 2, |st, a| sort_list(st, a, true)),
            ("sort", 4, sort4),
            ("keysort", 2, keysort),
            ("list_to_set", 2, list_to_set),
            ("atom_length", 2, |st, a| {
                let s = text_of(st, &a[0])?;
                st.unify(&a[1], &Term::int(s.chars().count() as i64))
            }),
            ("atom_chars", 2, |st, a| atom_parts(st, a, false)),
            ("atom_codes", 2, |st, a| atom_parts(st, a, true)),
            ("char_code", 2, char_code),
            ("atom_number", 2, atom_number),
            ("number_codes", 2, number_codes),
            ("atom_string", 2, |st, a| {
                let s = text_of(st, &a[0])?;
                st.unify(&a[1], &Term::atom(&s))
            }),
            ("atom_concat", 3, |st, a| {
                let x = text_of(st, &a[0])?;
                let y = text_of(st, &a[1])?;
                st.unify(&a[2], &Term::atom(&(x + &y)))
            }),
            ("atomic_list_concat", 2, |st, a| atomic_concat(st, &a[0], "", &a[1])),
            ("atomic_list_concat", 3, |st, a| {
                let sep = text_of(st, &a[1])?;
                atomic_concat(st, &a[0], &sep, &a[2])
            }),
            ("term_to_atom", 2, |st, a| {
                let s = term_to_string(&st.b.resolve(&a[0]));
                st.unify(&a[1], &Term::atom(&s))
            }),
            ("write", 1, |st, a| {
                emit(st, term_to_string_unquoted(&st.b.resolve(&a[0])))
            }),
            ("print", 1, |st, a| {
                emit(st, term_to_string_unquoted(&st.b.resolve(&a[0])))
            }),
            ("writeln", 1, |st, a| {
                let s = term_to_string_unquoted(&st.b.resolve(&a[0]));
                emit(st, s + "\n")
            }),
            ("writeq", 1, |st, a| emit(st, term_to_string(&st.b.resolve(&a[0])))),
            ("write_canonical", 1, |st, a| {
                emit(st, term_to_string(&st.b.resolve(&a[0])))
            }),
            ("nl", 0, |st, _| emit(st, "\n".into())),
            ("tab", 1, |st, a| {
                let n = eval_arith(&a[0], &st.b)?.to_f64().max(0.0) as usize;
                emit(st, " ".repeat(n))
            }),
            ("format", 1, |st, a| format(st, &a[0], &Term::nil())),
            ("format", 2, |st, a| format(st, &a[0], &a[1])),
            ("#=", 2, |st, a| hash(st, "#=", a)),
            ("#\\=", 2, |st, a| hash(st, "#\\=", a)),
            ("#<", 2, |st, a| hash(st, "#<", a)),
            ("#>", 2, |st, a| hash(st, "#>", a)),
            ("#=<", 2, |st, a| hash(st, "#=<", a)),
            ("#>=", 2, |st, a| hash(st, "#>=", a)),
            ("in", 2, |st, a| fd_domain(st, &a[0], &a[1])),
            ("ins", 2, ins),
            ("labeling", 2, labeling),
            ("sum", 3, sum3),
            ("{}", 1, |st, a| {
                let inner = a[0].clone();
                st.post_braces(&inner)
            }),
        ];
        entries.iter().map(|(n, a, f)| ((*n, *a), *f)).collect()
    })
}

pub(crate) fn lookup(name: &str, arity: usize) -> Option<Builtin> {
    table().get(&(name, arity)).copied()
}

/// Whether `name/arity` is a control construct or native builtin.
pub fn is_protected(name: &str, arity: usize) -> bool {
    CONTROL.contains(&(name, arity)) || table().contains_key(&(name, arity))
}

/// All protected predicate indicators, sorted.
pub fn builtin_names() -> Vec<String> {
    let mut v: Vec<String> = CONTROL
        .iter()
        .map(|(n, a)| format!("{n}/{a}"))
        .chain(table().keys().map(|(n, a)| format!("{n}/{a}")))
        .filter(|s| !s.starts_with('$'))
        .collect();
    v.sort();
    v
}

fn not_unifiable(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let mark = st.b.mark();
    let ok = st.b.unify(&a[0], &a[1], st.occurs_check);
    st.b.undo_to(mark);
    Ok(!ok)
}

fn arith_cmp(st: &mut State, a: &[Term], f: fn(Ordering) -> bool) -> Result<bool, EngineError> {
    let x = eval_arith(&a[0], &st.b)?;
    let y = eval_arith(&a[1], &st.b)?;
    Ok(f(compare_numbers(&x, &y)))
}

fn type_rank(t: &Term) -> u8 {
    match t {
        Term::Var(_) => 0,
        Term::Float(_) | Term::Int(_) | Term::Rat(_) => 1,
        Term::Atom(_) => 3,
        Term::Compound(..) => 4,
    }
}

impl State {
    /// Standard order of terms.
    pub fn compare(&self, a: &Term, b: &Term) -> Ordering {
        let a = self.b.deref(a);
        let b = self.b.deref(b);
        let (ra, rb) = (type_rank(a), type_rank(b));
        if ra != rb {
            return ra.cmp(&rb);
        }
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => x.cmp(y),
            (Term::Atom(x), Term::Atom(y)) => x.as_str().cmp(y.as_str()),
            (Term::Compound(f, xs), Term::Compound(g, ys)) => xs
                .len()
                .cmp(&ys.len())
                .then_with(|| f.as_str().cmp(g.as_str()))
                .then_with(|| {
                    for (x, y) in xs.iter().zip(ys.iter()) {
                        let o = self.compare(x, y);
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                    Ordering::Equal
                }),
            _ => {
                let x = Number::from_term(a).unwrap();
                let y = Number::from_term(b).unwrap();
                compare_numbers(&x, &y).then_with(|| {
                    // equal values: floats sort before exact numbers
                    let fx = matches!(a, Term::Float(_));
                    let fy = matches!(b, Term::Float(_));
                    fy.cmp(&fx)
                })
            }
        }
    }
}

fn compare3(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let o = match st.compare(&a[1], &a[2]) {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    };
    st.unify(&a[0], &Term::atom(o))
}

fn int_arg(st: &State, t: &Term, what: &str) -> Result<BigInt, EngineError> {
    match st.b.deref(t) {
        Term::Int(i) => Ok(i.clone()),
        Term::Var(_) => Err(EngineError::Instantiation(what.into())),
        other => Err(EngineError::type_error("integer", term_to_string(other))),
    }
}

fn functor(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let t = st.b.deref(&a[0]).clone();
    match &t {
        Term::Var(_) => {
            let n = int_arg(st, &a[2], "functor/3")?
                .to_usize()
                .ok_or_else(|| EngineError::Domain("arity".into()))?;
            let name = st.b.deref(&a[1]).clone();
            let built = if n == 0 {
                name
            } else {
                let Term::Atom(f) = name else {
                    return Err(EngineError::type_error("atom", term_to_string(&name)));
                };
                let base = st.b.fresh_block(n as u32);
                Term::compound_sym(
                    f,
                    (0..n as u32).map(|i| Term::Var(crate::term::VarId(base + i))).collect(),
                )
            };
            st.unify(&t, &built)
        }
        Term::Compound(f, args) => {
            let n = Term::int(args.len() as i64);
            Ok(st.unify(&a[1], &Term::Atom(*f))? && st.unify(&a[2], &n)?)
        }
        other => Ok(st.unify(&a[1], other)? && st.unify(&a[2], &Term::int(0))?),
    }
}

fn arg(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let n = int_arg(st, &a[0], "arg/3")?;
    let t = st.b.deref(&a[1]).clone();
    let Term::Compound(_, args) = &t else {
        return Err(EngineError::type_error("compound", term_to_string(&t)));
    };
    match n.to_usize() {
        Some(i) if i >= 1 && i <= args.len() => st.unify(&a[2], &args[i - 1]),
        _ => Ok(false),
    }
}

fn univ(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let t = st.b.deref(&a[0]).clone();
    match &t {
        Term::Var(_) => {
            let list = st.b.resolve(&a[1]);
            if !list.is_proper_list() {
                return Err(EngineError::Instantiation("=../2".into()));
            }
            let (items, _) = list.list_items();
            let Some((head, rest)) = items.split_first() else {
                return Err(EngineError::Domain("non-empty list".into()));
            };
            let built = if rest.is_empty() {
                (*head).clone()
            } else {
                match head {
                    Term::Atom(f) => Term::compound_sym(*f, rest.iter().map(|x| (*x).clone()).collect()),
                    other => return Err(EngineError::type_error("atom", term_to_string(other))),
                }
            };
            st.unify(&t, &built)
        }
        Term::Compound(f, args) => {
            let mut items = vec![Term::Atom(*f)];
            items.extend(args.iter().cloned());
            st.unify(&a[1], &Term::list(items))
        }
        other => st.unify(&a[1], &Term::list(vec![other.clone()])),
    }
}

fn length(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let mut count: i64 = 0;
    let mut cur = st.b.deref(&a[0]).clone();
    loop {
        match &cur {
            Term::Compound(f, args) if f.as_str() == "." && args.len() == 2 => {
                count += 1;
                cur = st.b.deref(&args[1]).clone();
            }
            _ => break,
        }
    }
    match (&cur, st.b.deref(&a[1]).clone()) {
        (t, n) if t.is_nil() => st.unify(&n, &Term::int(count)),
        (Term::Var(_), Term::Int(n)) => {
            let Some(n) = n.to_i64() else {
                return Err(EngineError::Representation("list length".into()));
            };
            if n < count {
                return Ok(false);
            }
            let k = (n - count) as u32;
            let base = st.b.fresh_block(k);
            let fresh = Term::list((0..k).map(|i| Term::Var(crate::term::VarId(base + i))).collect());
            st.unify(&cur, &fresh)
        }
        (Term::Var(_), Term::Var(_)) => {
            let h = st.height();
            st.push_goal(Term::compound("$length_enum", vec![a[0].clone(), a[1].clone()]), h);
            Ok(true)
        }
        (Term::Var(_), other) => Err(EngineError::type_error("integer", term_to_string(&other))),
        _ => Ok(false),
    }
}

fn proper_list(st: &State, t: &Term, what: &str) -> Result<Vec<Term>, EngineError> {
    let r = st.b.resolve(t);
    if !r.is_proper_list() {
        return Err(EngineError::Instantiation(format!("{what}: list expected")));
    }
    Ok(r.list_items().0.into_iter().cloned().collect())
}

fn sort_list(st: &mut State, a: &[Term], dedup: bool) -> Result<bool, EngineError> {
    let mut items = proper_list(st, &a[0], "sort")?;
    items.sort_by(|x, y| st.compare(x, y));
    if dedup {
        items.dedup_by(|x, y| st.compare(x, y) == Ordering::Equal);
    }
    st.unify(&a[1], &Term::list(items))
}

fn sort4(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let key = int_arg(st, &a[0], "sort/4")?.to_usize().unwrap_or(usize::MAX);
    let order = match st.b.deref(&a[1]) {
        Term::Atom(s) => s.as_str(),
        _ => return Err(EngineError::Instantiation("sort/4 order".into())),
    };
    let mut items = proper_list(st, &a[2], "sort/4")?;
    let pick = |t: &Term| -> Result<Term, EngineError> {
        if key == 0 {
            return Ok(t.clone());
        }
        match t {
            Term::Compound(_, args) if key <= args.len() => Ok(args[key - 1].clone()),
            other => Err(EngineError::type_error("compound", term_to_string(other))),
        }
    };
    let mut keyed = Vec::with_capacity(items.len());
    for t in items.drain(..) {
        keyed.push((pick(&t)?, t));
    }
    let desc = order.starts_with("@>");
    keyed.sort_by(|x, y| {
        let o = st.compare(&x.0, &y.0);
        if desc {
            o.reverse()
        } else {
            o
        }
    });
    if order == "@<" || order == "@>" {
        keyed.dedup_by(|x, y| st.compare(&x.0, &y.0) == Ordering::Equal);
    } else if order != "@=<" && order != "@>=" {
        return Err(EngineError::Domain(format!("sort/4 order {order}")));
    }
    st.unify(&a[3], &Term::list(keyed.into_iter().map(|(_, t)| t).collect()))
}

fn keysort(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let items = proper_list(st, &a[0], "keysort")?;
    let mut pairs = Vec::with_capacity(items.len());
    for t in items {
        if !t.is_functor("-", 2) {
            return Err(EngineError::type_error("pair", term_to_string(&t)));
        }
        pairs.push(t);
    }
    pairs.sort_by(|x, y| st.compare(&x.args()[0], &y.args()[0]));
    st.unify(&a[1], &Term::list(pairs))
}

fn list_to_set(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let items = proper_list(st, &a[0], "list_to_set")?;
    let mut out: Vec<Term> = Vec::new();
    for t in items {
        if !out.iter().any(|u| st.compare(u, &t) == Ordering::Equal) {
            out.push(t);
        }
    }
    st.unify(&a[1], &Term::list(out))
}

fn text_of(st: &State, t: &Term) -> Result<String, EngineError> {
    match st.b.deref(t) {
        Term::Atom(s) => Ok(s.as_str().to_owned()),
        Term::Var(_) => Err(EngineError::Instantiation("text".into())),
        other if other.is_number() => Ok(term_to_string(other)),
        other => Err(EngineError::type_error("atomic", term_to_string(other))),
    }
}

fn atom_parts(st: &mut State, a: &[Term], codes: bool) -> Result<bool, EngineError> {
    let to_item = |c: char| {
        if codes {
            Term::int(c as i64)
        } else {
            Term::atom(&c.to_string())
        }
    };
    if !matches!(st.b.deref(&a[0]), Term::Var(_)) {
        let s = text_of(st, &a[0])?;
        return st.unify(&a[1], &Term::list(s.chars().map(to_item).collect()));
    }
    let items = proper_list(st, &a[1], "atom_chars")?;
    let s = chars_from(&items)?;
    st.unify(&a[0], &Term::atom(&s))
}

fn chars_from(items: &[Term]) -> Result<String, EngineError> {
    let mut s = String::new();
    for t in items {
        match t {
            Term::Int(c) => s.push(
                c.to_u32()
                    .and_then(char::from_u32)
                    .ok_or_else(|| EngineError::Representation("character code".into()))?,
            ),
            Term::Atom(a) if a.as_str().chars().count() == 1 => s.push_str(a.as_str()),
            other => return Err(EngineError::type_error("character", term_to_string(other))),
        }
    }
    Ok(s)
}

fn char_code(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    match st.b.deref(&a[0]).clone() {
        Term::Atom(s) => {
            let c = s.as_str().chars().next().unwrap_or('\0');
            st.unify(&a[1], &Term::int(c as i64))
        }
        _ => {
            let c = int_arg(st, &a[1], "char_code/2")?;
            let ch = c
                .to_u32()
                .and_then(char::from_u32)
                .ok_or_else(|| EngineError::Representation("character code".into()))?;
            st.unify(&a[0], &Term::atom(&ch.to_string()))
        }
    }
}

fn parse_number(s: &str) -> Option<Term> {
    let t = crate::reader::read_term(s).ok()?;
    match &t {
        Term::Int(_) | Term::Rat(_) | Term::Float(_) => Some(t),
        _ => None,
    }
}

fn atom_number(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    match st.b.deref(&a[0]).clone() {
        Term::Atom(s) => match parse_number(s.as_str()) {
            Some(n) => st.unify(&a[1], &n),
            None => Ok(false),
        },
        Term::Var(_) => {
            let n = st.b.deref(&a[1]).clone();
            if !n.is_number() {
                return Err(EngineError::Instantiation("atom_number/2".into()));
            }
            st.unify(&a[0], &Term::atom(&term_to_string(&n)))
        }
        other => Err(EngineError::type_error("atom", term_to_string(&other))),
    }
}

fn number_codes(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let n = st.b.deref(&a[0]).clone();
    if n.is_number() {
        let s = term_to_string(&n);
        return st.unify(&a[1], &Term::list(s.chars().map(|c| Term::int(c as i64)).collect()));
    }
    let items = proper_list(st, &a[1], "number_codes")?;
    let s = chars_from(&items)?;
    match parse_number(&s) {
        Some(v) => st.unify(&a[0], &v),
        None => Err(EngineError::Domain(format!("not a number: {s}"))),
    }
}

fn atomic_concat(st: &mut State, list: &Term, sep: &str, out: &Term) -> Result<bool, EngineError> {
    let items = proper_list(st, list, "atomic_list_concat")?;
    let parts = items.iter().map(|t| text_of(st, t)).collect::<Result<Vec<_>, _>>()?;
    st.unify(out, &Term::atom(&parts.join(sep)))
}

fn emit(st: &mut State, s: String) -> Result<bool, EngineError> {
    st.out.push_str(&s);
    Ok(true)
}

fn number_arg(st: &State, t: Option<&Term>) -> Result<Number, EngineError> {
    let t = t.ok_or_else(|| EngineError::Domain("format: not enough arguments".into()))?;
    eval_arith(t, &st.b)
}

fn format(st: &mut State, fmt: &Term, args: &Term) -> Result<bool, EngineError> {
    let f = match st.b.deref(fmt).clone() {
        Term::Atom(s) => s.as_str().to_owned(),
        t if t.is_proper_list() || t.is_nil() => {
            let items: Vec<Term> = st.b.resolve(&t).list_items().0.into_iter().cloned().collect();
            chars_from(&items)?
        }
        other => return Err(EngineError::type_error("format string", term_to_string(&other))),
    };
    let args_t = st.b.resolve(args);
    let args: Vec<Term> = if args_t.is_proper_list() {
        args_t.list_items().0.into_iter().cloned().collect()
    } else {
        vec![args_t]
    };
    let mut it = args.iter();
    let mut out = String::new();
    let mut chars = f.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '~' {
            out.push(c);
            continue;
        }
        let mut num = String::new();
        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            num.push(*d);
            chars.next();
        }
        let count: Option<usize> = num.parse().ok();
        let Some(d) = chars.next() else {
            return Err(EngineError::Domain("format: trailing ~".into()));
        };
        match d {
            'w' | 'p' => out.push_str(&term_to_string_unquoted(&next_arg(&mut it)?)),
            'q' => out.push_str(&term_to_string(&next_arg(&mut it)?)),
            'a' => out.push_str(&term_to_string_unquoted(&next_arg(&mut it)?)),
            'd' | 'D' => {
                let n = number_arg(st, it.next())?;
                let Number::Int(i) = n else {
                    return Err(EngineError::type_error("integer", n));
                };
                let digits = i.abs().to_string();
                let sign = if i.is_negative() { "-" } else { "" };
                match count.filter(|k| *k > 0) {
                    Some(k) => {
                        let padded = format!("{:0>width$}", digits, width = k + 1);
                        let (int, frac) = padded.split_at(padded.len() - k);
                        let _ = write!(out, "{sign}{int}.{frac}");
                    }
                    None => {
                        let _ = write!(out, "{sign}{digits}");
                    }
                }
            }
            'f' | 'e' | 'g' => {
                let x = number_arg(st, it.next())?.to_f64();
                let k = count.unwrap_or(6);
                match d {
                    'f' => {
                        let _ = write!(out, "{x:.k$}");
                    }
                    'e' => {
                        let _ = write!(out, "{x:.k$e}");
                    }
                    _ => out.push_str(&format_float(x)),
                }
            }
            'n' => out.push_str(&"\n".repeat(count.unwrap_or(1))),
            'c' => {
                let code = number_arg(st, it.next())?;
                let ch = match code {
                    Number::Int(i) => i.to_u32().and_then(char::from_u32),
                    _ => None,
                }
                .ok_or_else(|| EngineError::Representation("character code".into()))?;
                out.push_str(&ch.to_string().repeat(count.unwrap_or(1)));
            }
            's' => {
                let t = next_arg(&mut it)?;
                let items: Vec<Term> = t.list_items().0.into_iter().cloned().collect();
                out.push_str(&chars_from(&items)?);
            }
            'i' => {
                next_arg(&mut it)?;
            }
            '~' => out.push('~'),
            't' | '|' | '+' => {}
            other => return Err(EngineError::Domain(format!("format directive ~{other}"))),
        }
    }
    st.out.push_str(&out);
    Ok(true)
}

fn next_arg(it: &mut std::slice::Iter<'_, Term>) -> Result<Term, EngineError> {
    it.next()
        .cloned()
        .ok_or_else(|| EngineError::Domain("format: not enough arguments".into()))
}

fn hash(st: &mut State, op: &str, a: &[Term]) -> Result<bool, EngineError> {
    let goal = Term::compound(op, a.to_vec());
    st.post_hash(&goal)
}

fn fd_domain(st: &mut State, x: &Term, dom: &Term) -> Result<bool, EngineError> {
    if let Term::Var(v) = st.b.deref(x) {
        if st.r.contains(*v) {
            return Err(EngineError::TypeMix(format!("_{}", v.0)));
        }
    }
    let from = st.b.trail_len();
    if !fd_in(x, dom, &st.b, &mut st.fd)? {
        return Ok(false);
    }
    st.settle(from)
}

fn ins(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    for x in proper_list(st, &a[0], "ins/2")? {
        if !fd_domain(st, &x, &a[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn labeling(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let opts = proper_list(st, &a[0], "labeling/2 options")?;
    let (mut sel, mut ord) = st.default_strategy_term();
    for o in opts {
        match &o {
            Term::Atom(s) => match s.as_str() {
                "ff" | "ffc" => sel = Term::atom("ff"),
                "leftmost" | "min" | "max" => sel = Term::atom("leftmost"),
                "up" | "down" => ord = o.clone(),
                "step" | "enum" | "bisect" => {}
                other => return Err(EngineError::Domain(format!("labeling option {other}"))),
            },
            other => {
                return Err(EngineError::Domain(format!(
                    "labeling option {}",
                    term_to_string(other)
                )))
            }
        }
    }
    let vars = Term::list(proper_list(st, &a[1], "labeling/2")?);
    let h = st.height();
    st.push_goal(Term::compound("$label", vec![vars, sel, ord]), h);
    Ok(true)
}

fn sum3(st: &mut State, a: &[Term]) -> Result<bool, EngineError> {
    let items = proper_list(st, &a[0], "sum/3")?;
    let expr = items
        .into_iter()
        .reduce(|acc, x| Term::compound("+", vec![acc, x]))
        .unwrap_or_else(|| Term::Int(BigInt::zero()));
    let op = match st.b.deref(&a[1]) {
        Term::Atom(s) if crate::fd::is_fd_relation(s.as_str()) => *s,
        other => return Err(EngineError::Domain(format!("sum/3 relation {}", term_to_string(other)))),
    };
    let goal = Term::compound_sym(op, vec![expr, a[2].clone()]);
    st.post_hash(&goal)
}
