//! Translation of `#` goals into normalized store constraints.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::domain::{FdDomain, FD_LIMIT, INF, SUP};
use super::store::{FdConstraint, FdStore};
use crate::arith::eval_arith;
use crate::error::EngineError;
use crate::term::{Bindings, Number, Term, VarId};
use crate::write::term_to_string;

/// `Σ cᵢ·xᵢ + k`.
#[derive(Clone, Debug, Default)]
struct Lin {
    terms: Vec<(BigInt, VarId)>,
    k: BigInt,
}

impl Lin {
    fn constant(k: BigInt) -> Lin {
        Lin { terms: Vec::new(), k }
    }

    fn var(v: VarId) -> Lin {
        Lin {
            terms: vec![(BigInt::from(1), v)],
            k: BigInt::zero(),
        }
    }

    fn scale(mut self, c: &BigInt) -> Lin {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self.k *= c;
        self
    }

    fn add(mut self, other: Lin) -> Lin {
        for (c, v) in other.terms {
            match self.terms.iter_mut().find(|(_, w)| *w == v) {
                Some(e) => e.0 += c,
                None => self.terms.push((c, v)),
            }
        }
        self.k += other.k;
        self.terms.retain(|(c, _)| !c.is_zero());
        self
    }

    fn is_const(&self) -> bool {
        self.terms.is_empty()
    }

    /// The variable itself when the expression is exactly `1·x`.
    fn as_var(&self) -> Option<VarId> {
        match self.terms.as_slice() {
            [(c, v)] if *c == BigInt::from(1) && self.k.is_zero() => Some(*v),
            _ => None,
        }
    }
}

fn small(n: &BigInt) -> Result<i64, EngineError> {
    n.to_i64()
        .filter(|v| v.abs() <= FD_LIMIT)
        .ok_or_else(|| EngineError::Representation(format!("integer {n} exceeds the finite-domain range")))
}

fn int_value(t: &Term, b: &Bindings) -> Result<BigInt, EngineError> {
    match eval_arith(t, b)? {
        Number::Int(i) => Ok(i),
        other => Err(EngineError::type_error("integer", other)),
    }
}

fn is_ground(t: &Term, b: &Bindings) -> bool {
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match b.deref(t) {
            Term::Var(_) => return false,
            Term::Compound(_, args) => stack.extend(args.iter()),
            _ => {}
        }
    }
    true
}

struct Flattener<'a> {
    b: &'a mut Bindings,
    aux: Vec<FdConstraint>,
}

impl Flattener<'_> {
    fn lin(&mut self, t: &Term) -> Result<Lin, EngineError> {
        let t = self.b.deref(t).clone();
        match &t {
            Term::Var(v) => return Ok(Lin::var(*v)),
            Term::Int(i) => return Ok(Lin::constant(i.clone())),
            Term::Rat(_) | Term::Float(_) => return Err(EngineError::type_error("integer", term_to_string(&t))),
            Term::Atom(_) => return Err(EngineError::type_error("integer", term_to_string(&t))),
            Term::Compound(..) => {}
        }
        if is_ground(&t, self.b) {
            return Ok(Lin::constant(int_value(&t, self.b)?));
        }
        let name = t.key().map(|(f, _)| f.as_str()).unwrap_or("");
        let args = t.args();
        match (name, args.len()) {
            ("+", 2) => Ok(self.lin(&args[0])?.add(self.lin(&args[1])?)),
            ("-", 2) => {
                let r = self.lin(&args[1])?.scale(&BigInt::from(-1));
                Ok(self.lin(&args[0])?.add(r))
            }
            ("-", 1) => Ok(self.lin(&args[0])?.scale(&BigInt::from(-1))),
            ("+", 1) => self.lin(&args[0]),
            ("*", 2) => {
                let l = self.lin(&args[0])?;
                let r = self.lin(&args[1])?;
                if l.is_const() {
                    Ok(r.scale(&l.k))
                } else if r.is_const() {
                    Ok(l.scale(&r.k))
                } else {
                    Err(EngineError::NonLinearUnsupported(term_to_string(&self.b.resolve(&t))))
                }
            }
            ("abs", 1) => {
                let x = self.name_var(&args[0])?;
                let y = self.b.fresh();
                self.aux.push(FdConstraint::Abs { x, y });
                Ok(Lin::var(y))
            }
            ("mod", 2) => {
                if !is_ground(&args[1], self.b) {
                    return Err(EngineError::NonLinearUnsupported(term_to_string(&self.b.resolve(&t))));
                }
                let m = small(&int_value(&args[1], self.b)?)?;
                if m == 0 {
                    return Err(EngineError::ZeroDivisor);
                }
                let x = self.name_var(&args[0])?;
                let r = self.b.fresh();
                self.aux.push(FdConstraint::Mod { x, m, r });
                Ok(Lin::var(r))
            }
            _ => Err(EngineError::NonLinearUnsupported(term_to_string(&self.b.resolve(&t)))),
        }
    }

    /// Names a subexpression with a variable, introducing `aux = expr`
    /// when it is not already a plain variable.
    fn name_var(&mut self, t: &Term) -> Result<VarId, EngineError> {
        let l = self.lin(t)?;
        if let Some(v) = l.as_var() {
            return Ok(v);
        }
        let aux = self.b.fresh();
        let eq = Lin::var(aux).add(l.scale(&BigInt::from(-1)));
        let (terms, k) = normalize(eq)?;
        self.aux.push(FdConstraint::LinEq(terms, k));
        Ok(aux)
    }
}

/// `Σ c·x + k ⋈ 0` as `(terms, -k)`.
fn normalize(l: Lin) -> Result<(Vec<(i64, VarId)>, i64), EngineError> {
    let terms = l
        .terms
        .iter()
        .map(|(c, v)| Ok((small(c)?, *v)))
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok((terms, small(&-l.k)?))
}

/// The `#` relations understood by [`fd_post`].
pub fn is_fd_relation(name: &str) -> bool {
    matches!(name, "#=" | "#\\=" | "#<" | "#>" | "#=<" | "#>=")
}

/// Flattens a `#` relation into store constraints and propagates. Returns
/// `Ok(false)` when the store becomes inconsistent. Auxiliary variables
/// are allocated from `b`.
pub fn fd_post(goal: &Term, b: &mut Bindings, store: &mut FdStore) -> Result<bool, EngineError> {
    let goal = b.deref(goal).clone();
    let (name, args) = match &goal {
        Term::Compound(f, args) if args.len() == 2 && is_fd_relation(f.as_str()) => (f.as_str(), args.clone()),
        other => return Err(EngineError::type_error("finite-domain relation", term_to_string(other))),
    };
    let mut fl = Flattener { b, aux: Vec::new() };
    let l = fl.lin(&args[0])?;
    let r = fl.lin(&args[1])?;
    let diff = l.add(r.scale(&BigInt::from(-1)));
    let (terms, k) = normalize(diff)?;
    for v in terms.iter().map(|(_, v)| *v) {
        store.register(v);
    }
    let main = match name {
        "#=" => FdConstraint::LinEq(terms, k),
        "#\\=" => FdConstraint::LinNeq(terms, k),
        "#<" => FdConstraint::LinLt(terms, k),
        "#>" => FdConstraint::LinGt(terms, k),
        "#=<" => FdConstraint::LinLe(terms, k),
        _ => FdConstraint::LinGe(terms, k),
    };
    let aux = std::mem::take(&mut fl.aux);
    for c in aux.into_iter().chain(std::iter::once(main)) {
        if !store.post(c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn bound(t: &Term, b: &Bindings) -> Result<i64, EngineError> {
    match b.deref(t) {
        Term::Atom(s) if s.as_str() == "inf" => Ok(INF),
        Term::Atom(s) if s.as_str() == "sup" => Ok(SUP),
        other => small(&int_value(other, b)?),
    }
}

/// Reads a domain expression: `L..H`, `D1 \/ D2`, or an integer.
pub fn parse_domain(t: &Term, b: &Bindings) -> Result<FdDomain, EngineError> {
    let t = b.deref(t);
    if let Term::Var(_) = t {
        return Err(EngineError::Instantiation("domain".into()));
    }
    if t.is_functor("..", 2) {
        let lo = bound(&t.args()[0], b)?;
        let hi = bound(&t.args()[1], b)?;
        return Ok(FdDomain::range(lo, hi));
    }
    if t.is_functor("\\/", 2) {
        let l = parse_domain(&t.args()[0], b)?;
        let r = parse_domain(&t.args()[1], b)?;
        return Ok(l.union(&r));
    }
    match bound(t, b) {
        Ok(v) if v != INF && v != SUP => Ok(FdDomain::singleton(v)),
        _ => Err(EngineError::type_error("domain", term_to_string(&b.resolve(t)))),
    }
}

/// `X in Dom`. Bound integers are checked for membership.
pub fn fd_in(x: &Term, dom: &Term, b: &Bindings, store: &mut FdStore) -> Result<bool, EngineError> {
    let d = parse_domain(dom, b)?;
    match b.deref(x) {
        Term::Var(v) => Ok(store.restrict(*v, &d)),
        Term::Int(i) => Ok(d.contains(small(i)?)),
        other => Err(EngineError::type_error("integer", term_to_string(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::parse_query;

    fn setup(src: &str) -> (Bindings, Vec<Term>, crate::reader::Query) {
        let q = parse_query(src).unwrap();
        let mut b = Bindings::new();
        b.fresh_block(q.nvars);
        let mut goals = Vec::new();
        crate::reader::flatten_conjunction(&q.goal, &mut goals);
        (b, goals, q)
    }

    fn run(src: &str) -> Option<(Bindings, FdStore, crate::reader::Query)> {
        let (mut b, goals, q) = setup(src);
        let mut s = FdStore::new();
        for g in goals {
            let ok = if g.is_functor("in", 2) {
                fd_in(&g.args()[0], &g.args()[1], &b, &mut s).unwrap()
            } else {
                fd_post(&g, &mut b, &mut s).unwrap()
            };
            if !ok {
                return None;
            }
        }
        Some((b, s, q))
    }

    fn dom_of(src: &str, var: &str) -> String {
        let (_, s, q) = run(src).expect("consistent");
        s.domain(q.var(var).unwrap()).unwrap().to_string()
    }

    #[test]
    fn mod_disequality() {
        assert_eq!(dom_of("X in 0..9, X mod 2 #\\= 0", "X"), "1\\/3\\/5\\/7\\/9");
    }

    #[test]
    fn abs_image() {
        assert_eq!(dom_of("X in -2..7, Y #= abs(X)", "Y"), "0..7");
    }

    #[test]
    fn abs_difference_gap() {
        // abs(D3 - D2) #> 3 with D2 fixed at 2 leaves D3 in 6..9
        assert_eq!(dom_of("D3 in 0..9, D2 #= 2, abs(D3 - D2) #> 3", "D3"), "6..9");
    }

    #[test]
    fn antisymmetry_with_bounds() {
        assert!(run("X in 0..9, Y in 0..9, X #> Y, Y #> X").is_none());
    }

    #[test]
    fn nonlinear_rejected() {
        let (mut b, goals, _) = setup("X * Y #= Z");
        let mut s = FdStore::new();
        assert!(matches!(
            fd_post(&goals[0], &mut b, &mut s),
            Err(EngineError::NonLinearUnsupported(_))
        ));
    }

    #[test]
    fn ground_subterms_evaluate() {
        assert_eq!(dom_of("X #= 2 * 3 + 10 // 3", "X"), "9");
    }

    #[test]
    fn domain_union() {
        assert_eq!(dom_of("X in 1..3 \\/ 7..8", "X"), "1..3\\/7..8");
        assert_eq!(dom_of("X in 5..sup, X #=< 6", "X"), "5..6");
    }
}
