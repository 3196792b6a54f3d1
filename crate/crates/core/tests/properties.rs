//! Randomized laws checked against independent oracles.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use deduce_core::clpr::{r_post, RStore};
use deduce_core::engine::run_all;
use deduce_core::fd::{FdConstraint, FdDomain, FdStore};
use deduce_core::term::rat_normalize;
use deduce_core::write::term_to_string;
use deduce_core::{consult, parse_program, parse_query, read_term, Bindings, Machine, Term, VarId};

// ---------------------------------------------------------------- terms

/// Renames variables to 0, 1, ... in order of first appearance.
fn canonical(t: &Term, map: &mut HashMap<VarId, u32>) -> Term {
    match t {
        Term::Var(v) => {
            let n = map.len() as u32;
            Term::Var(VarId(*map.entry(*v).or_insert(n)))
        }
        Term::Compound(f, args) => Term::compound_sym(*f, args.iter().map(|a| canonical(a, map)).collect()),
        other => other.clone(),
    }
}

fn variant(a: &Term, b: &Term) -> bool {
    canonical(a, &mut HashMap::new()) == canonical(b, &mut HashMap::new())
}

fn arb_atom() -> impl Strategy<Value = Term> {
    prop_oneof![prop::sample::select(vec![
        "a", "foo", "[]", "{}", "!", ";", "-", "+", "is", "mod", "#=", "\\+", ",", "|", "Abc", "a b", "it's", "",
        "\\n", "rdiv", ":-", "dynamic"
    ])
    .prop_map(Term::atom),]
}

fn arb_leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        arb_atom(),
        (-1000i64..1000).prop_map(Term::int),
        (-50i64..50, 1i64..20).prop_map(|(n, d)| Term::rational(BigRational::new(n.into(), d.into()))),
        (0u32..4).prop_map(|v| Term::Var(VarId(v))),
    ]
}

fn arb_term() -> impl Strategy<Value = Term> {
    arb_leaf().prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            (
                prop::sample::select(vec![
                    "f", "g", "-", "+", "*", "-", "\\+", "=", ",", ";", "->", ":-", "#=", "mod", "is", "{}", "^", "**",
                    "a b", "[]"
                ]),
                prop::collection::vec(inner.clone(), 1..4)
            )
                .prop_map(|(f, args)| Term::compound(f, args)),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Term::list),
            (prop::collection::vec(inner.clone(), 1..3), inner)
                .prop_map(|(items, tail)| Term::list_with_tail(items, tail)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn print_parse_round_trip(t in arb_term()) {
        let text = term_to_string(&t);
        let back = read_term(&format!("{text} ."));
        prop_assert!(back.is_ok(), "{text}: {:?}", back.err());
        let back = back.unwrap();
        prop_assert!(variant(&t, &back), "{text} read back as {}", term_to_string(&back));
    }
}

// --------------------------------------------------------- priority law

#[derive(Clone, Copy, Debug)]
struct Infix {
    name: &'static str,
    prio: u16,
    left: u16,
    right: u16,
}

fn infix(name: &'static str, prio: u16, kind: &str) -> Infix {
    let (left, right) = match kind {
        "xfx" => (prio - 1, prio - 1),
        "xfy" => (prio - 1, prio),
        "yfx" => (prio, prio - 1),
        _ => unreachable!(),
    };
    Infix {
        name,
        prio,
        left,
        right,
    }
}

fn infix_table() -> Vec<Infix> {
    vec![
        infix(":-", 1200, "xfx"),
        infix(";", 1100, "xfy"),
        infix("->", 1050, "xfy"),
        infix(",", 1000, "xfy"),
        infix("=", 700, "xfx"),
        infix("is", 700, "xfx"),
        infix("<", 700, "xfx"),
        infix("#=", 700, "xfx"),
        infix("#\\=", 700, "xfx"),
        infix("=..", 700, "xfx"),
        infix("+", 500, "yfx"),
        infix("-", 500, "yfx"),
        infix("*", 400, "yfx"),
        infix("/", 400, "yfx"),
        infix("mod", 400, "yfx"),
        infix("//", 400, "yfx"),
        infix("**", 200, "xfx"),
        infix("^", 200, "xfy"),
    ]
}

#[derive(Clone, Debug)]
enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Infix, Box<Tree>),
}

impl Tree {
    fn prio(&self) -> u16 {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(_, op, _) => op.prio,
        }
    }

    fn parenthesized(&self) -> String {
        match self {
            Tree::Leaf(i) => format!("x{i}"),
            Tree::Node(l, op, r) => format!("({} {} {})", l.parenthesized(), op.name, r.parenthesized()),
        }
    }
}

/// Every bracketing of `leaves` / `ops[lo..hi]` that respects priorities.
fn valid_trees(ops: &[Infix], lo: usize, hi: usize) -> Vec<Tree> {
    if lo == hi {
        return vec![Tree::Leaf(lo)];
    }
    let mut out = Vec::new();
    for split in lo..hi {
        let op = ops[split];
        for l in valid_trees(ops, lo, split) {
            if l.prio() > op.left {
                continue;
            }
            for r in valid_trees(ops, split + 1, hi) {
                if r.prio() <= op.right {
                    out.push(Tree::Node(Box::new(l.clone()), op, Box::new(r)));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn priority_law(idx in prop::collection::vec(0usize..18, 1..6)) {
        let table = infix_table();
        let ops: Vec<Infix> = idx.iter().map(|&i| table[i]).collect();
        let mut flat = String::from("x0");
        for (i, op) in ops.iter().enumerate() {
            flat.push_str(&format!(" {} x{}", op.name, i + 1));
        }
        let trees = valid_trees(&ops, 0, ops.len());
        prop_assert!(trees.len() <= 1, "ambiguous table for {flat}");
        let parsed = read_term(&format!("{flat} ."));
        match trees.first() {
            None => prop_assert!(parsed.is_err(), "{flat} should clash"),
            Some(tree) => {
                let expected = read_term(&format!("{} .", tree.parenthesized())).unwrap();
                prop_assert!(parsed.is_ok(), "{flat}: {:?}", parsed.err());
                prop_assert!(variant(&parsed.unwrap(), &expected), "{flat}");
            }
        }
    }
}

// ------------------------------------------------------ trail discipline

fn snapshot(b: &Bindings) -> Vec<Option<Term>> {
    (0..b.var_count() as u32).map(|v| b.lookup(VarId(v)).cloned()).collect()
}

proptest! {
    #[test]
    fn trail_discipline(pre in prop::collection::vec((0u32..12, 0u32..12, 0i64..4), 0..10),
                        post in prop::collection::vec((0u32..12, 0u32..12, 0i64..4), 1..12)) {
        let mut b = Bindings::new();
        b.fresh_block(12);
        let apply = |b: &mut Bindings, ops: &[(u32, u32, i64)]| {
            for &(x, y, k) in ops {
                let rhs = match k {
                    0 => Term::Var(VarId(y)),
                    1 => Term::int(y as i64),
                    2 => Term::compound("f", vec![Term::Var(VarId(y))]),
                    _ => Term::atom("a"),
                };
                let _ = b.unify(&Term::Var(VarId(x)), &rhs, true);
            }
        };
        apply(&mut b, &pre);
        let before = snapshot(&b);
        let mark = b.mark();
        apply(&mut b, &post);
        b.fresh_block(3);
        b.undo_to(mark);
        prop_assert_eq!(snapshot(&b), before);
    }
}

// -------------------------------------------------------- rational laws

fn rat(n: i64, d: i64) -> BigRational {
    rat_normalize(n.into(), d.into()).unwrap()
}

proptest! {
    #[test]
    fn rational_field_laws(a in -99i64..99, b in 1i64..99, c in -99i64..99, d in 1i64..99,
                           e in -99i64..99, f in 1i64..99) {
        let (x, y, z) = (rat(a, b), rat(c, d), rat(e, f));
        prop_assert_eq!(&x + &y, rat(a * d + c * b, b * d));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
        prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
        let canon = rat(a, -b);
        prop_assert!(canon.denom().is_positive());
        prop_assert!(num_integer::Integer::gcd(canon.numer(), canon.denom()).is_one() || canon.is_zero());
    }
}

// ------------------------------------------------------ Datalog fixpoint

#[derive(Clone, Debug)]
enum Rule {
    Join(usize, usize),
    Swap(usize),
    Both(usize, usize),
}

fn datalog_case(seed: u64) -> (String, Vec<HashSet<(u8, u8)>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut facts: Vec<HashSet<(u8, u8)>> = vec![HashSet::new(); 3];
    let mut src = String::new();
    for (p, set) in facts.iter_mut().enumerate() {
        // every predicate has at least one clause
        set.insert((9, 9));
        src.push_str(&format!("p{p}(c9, c9).\n"));
    }
    for _ in 0..rng.random_range(0..=8) {
        let p = rng.random_range(0..3);
        let (x, y) = (rng.random_range(0..4u8), rng.random_range(0..4u8));
        facts[p].insert((x, y));
        src.push_str(&format!("p{p}(c{x}, c{y}).\n"));
    }
    let mut rules: Vec<(usize, Rule)> = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        let head = rng.random_range(1..3);
        let b1 = rng.random_range(0..head);
        let b2 = rng.random_range(0..head);
        let rule = match rng.random_range(0..3) {
            0 => Rule::Join(b1, b2),
            1 => Rule::Swap(b1),
            _ => Rule::Both(b1, b2),
        };
        src.push_str(&match rule {
            Rule::Join(a, b) => format!("p{head}(X, Y) :- p{a}(X, Z), p{b}(Z, Y).\n"),
            Rule::Swap(a) => format!("p{head}(X, Y) :- p{a}(Y, X).\n"),
            Rule::Both(a, b) => format!("p{head}(X, Y) :- p{a}(X, Y), p{b}(X, Y).\n"),
        });
        rules.push((head, rule));
    }
    // naive bottom-up fixpoint
    let mut model = facts;
    loop {
        let mut grew = false;
        for (head, rule) in &rules {
            let derived: Vec<(u8, u8)> = match rule {
                Rule::Join(a, b) => model[*a]
                    .iter()
                    .flat_map(|&(x, z)| {
                        model[*b]
                            .iter()
                            .filter(move |&&(z2, _)| z2 == z)
                            .map(move |&(_, y)| (x, y))
                    })
                    .collect(),
                Rule::Swap(a) => model[*a].iter().map(|&(x, y)| (y, x)).collect(),
                Rule::Both(a, b) => model[*a].intersection(&model[*b]).copied().collect(),
            };
            for t in derived {
                grew |= model[*head].insert(t);
            }
        }
        if !grew {
            break;
        }
    }
    (src, model)
}

#[test]
fn datalog_matches_fixpoint() {
    for seed in 0..300 {
        let (src, model) = datalog_case(seed);
        for (p, expected) in model.iter().enumerate() {
            let sols = run_all(&src, &format!("p{p}(X, Y)")).unwrap();
            let got: HashSet<(u8, u8)> = sols
                .iter()
                .map(|s| {
                    let num = |n: &str| term_to_string(s.get(n).unwrap())[1..].parse::<u8>().unwrap();
                    (num("X"), num("Y"))
                })
                .collect();
            assert_eq!(&got, expected, "seed {seed}, p{p}\n{src}");
        }
    }
}

// ---------------------------------------------- finite domains vs brute

#[derive(Clone, Debug)]
enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    fn op(&self) -> &'static str {
        match self {
            Rel::Eq => "#=",
            Rel::Ne => "#\\=",
            Rel::Lt => "#<",
            Rel::Le => "#=<",
            Rel::Gt => "#>",
            Rel::Ge => "#>=",
        }
    }

    fn holds(&self, a: i64, b: i64) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Ne => a != b,
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug)]
enum Con {
    Lin(Vec<(i64, usize)>, Rel, i64),
    Mod(usize, i64, Rel, i64),
    Abs(usize, usize, Rel, i64),
    Or(Box<Con>, Box<Con>),
}

impl Con {
    fn render(&self) -> String {
        match self {
            Con::Lin(terms, rel, k) => {
                let lhs: Vec<String> = terms.iter().map(|(c, v)| format!("{c}*X{v}")).collect();
                format!("{} {} {k}", lhs.join(" + "), rel.op())
            }
            Con::Mod(x, m, rel, r) => format!("X{x} mod {m} {} {r}", rel.op()),
            Con::Abs(x, y, rel, k) => format!("abs(X{x} - X{y}) {} {k}", rel.op()),
            Con::Or(a, b) => format!("({} ; {})", a.render(), b.render()),
        }
    }

    fn holds(&self, vals: &[i64]) -> bool {
        match self {
            Con::Lin(terms, rel, k) => rel.holds(terms.iter().map(|(c, v)| c * vals[*v]).sum(), *k),
            Con::Mod(x, m, rel, r) => rel.holds(vals[*x].rem_euclid(*m), *r),
            Con::Abs(x, y, rel, k) => rel.holds((vals[*x] - vals[*y]).abs(), *k),
            Con::Or(a, b) => a.holds(vals) || b.holds(vals),
        }
    }
}

fn random_rel(rng: &mut ChaCha8Rng) -> Rel {
    match rng.random_range(0..6) {
        0 => Rel::Eq,
        1 => Rel::Ne,
        2 => Rel::Lt,
        3 => Rel::Le,
        4 => Rel::Gt,
        _ => Rel::Ge,
    }
}

fn random_simple(rng: &mut ChaCha8Rng, n: usize) -> Con {
    match rng.random_range(0..4) {
        0 | 1 => {
            let k = rng.random_range(1..=3.min(n));
            let mut vars: Vec<usize> = (0..n).collect();
            let mut terms = Vec::new();
            for _ in 0..k {
                let v = vars.remove(rng.random_range(0..vars.len()));
                let mut c = rng.random_range(-3..=3);
                if c == 0 {
                    c = 1;
                }
                terms.push((c, v));
            }
            Con::Lin(terms, random_rel(rng), rng.random_range(-10..=20))
        }
        2 => {
            let m = rng.random_range(2..=4);
            let rel = if rng.random_bool(0.5) { Rel::Eq } else { Rel::Ne };
            Con::Mod(rng.random_range(0..n), m, rel, rng.random_range(0..m))
        }
        _ => Con::Abs(
            rng.random_range(0..n),
            rng.random_range(0..n),
            random_rel(rng),
            rng.random_range(0..6),
        ),
    }
}

struct Csp {
    doms: Vec<(i64, i64)>,
    cons: Vec<Con>,
}

fn random_csp(seed: u64, allow_or: bool) -> Csp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=5);
    let doms = (0..n)
        .map(|_| {
            let lo = rng.random_range(0..=9);
            (lo, rng.random_range(lo..=9))
        })
        .collect();
    let cons = (0..rng.random_range(0..=6))
        .map(|_| {
            if allow_or && rng.random_bool(0.2) {
                Con::Or(
                    Box::new(random_simple(&mut rng, n)),
                    Box::new(random_simple(&mut rng, n)),
                )
            } else {
                random_simple(&mut rng, n)
            }
        })
        .collect();
    Csp { doms, cons }
}

fn brute(csp: &Csp) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut vals: Vec<i64> = csp.doms.iter().map(|d| d.0).collect();
    'outer: loop {
        if csp.cons.iter().all(|c| c.holds(&vals)) {
            out.push(vals.clone());
        }
        for i in (0..vals.len()).rev() {
            if vals[i] < csp.doms[i].1 {
                vals[i] += 1;
                for (j, v) in vals.iter_mut().enumerate().skip(i + 1) {
                    *v = csp.doms[j].0;
                }
                continue 'outer;
            }
        }
        break;
    }
    out
}

fn label_with_engine(csp: &Csp) -> Vec<Vec<i64>> {
    let n = csp.doms.len();
    let names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let mut goals = vec![format!("Vs = [{}]", names.join(","))];
    for (i, (lo, hi)) in csp.doms.iter().enumerate() {
        goals.push(format!("X{i} in {lo}..{hi}"));
    }
    goals.extend(csp.cons.iter().map(Con::render));
    goals.push("label(Vs)".into());
    let q = goals.join(", ");
    run_all("", &q)
        .unwrap_or_else(|e| panic!("{q}: {e}"))
        .iter()
        .map(|s| {
            s.get("Vs")
                .unwrap()
                .list_items()
                .0
                .iter()
                .map(|t| term_to_string(t).parse::<i64>().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn labeling_equals_brute_force_in_order() {
    for seed in 0..300 {
        let csp = random_csp(seed, false);
        assert_eq!(label_with_engine(&csp), brute(&csp), "seed {seed}: {:?}", csp.cons);
    }
}

#[test]
fn disjunction_by_choice_points_equals_brute_force() {
    for seed in 1000..1300 {
        let csp = random_csp(seed, true);
        let got: BTreeSet<Vec<i64>> = label_with_engine(&csp).into_iter().collect();
        let want: BTreeSet<Vec<i64>> = brute(&csp).into_iter().collect();
        assert_eq!(got, want, "seed {seed}: {:?}", csp.cons);
    }
}

/// Posts `c` straight into a store; `next` hands out auxiliary variables.
fn post_store(store: &mut FdStore, c: &Con, next: &mut u32) -> bool {
    let v = |i: usize| VarId(i as u32);
    let rel = |terms: Vec<(i64, VarId)>, r: &Rel, k: i64| match r {
        Rel::Eq => FdConstraint::LinEq(terms, k),
        Rel::Ne => FdConstraint::LinNeq(terms, k),
        Rel::Lt => FdConstraint::LinLt(terms, k),
        Rel::Le => FdConstraint::LinLe(terms, k),
        Rel::Gt => FdConstraint::LinGt(terms, k),
        Rel::Ge => FdConstraint::LinGe(terms, k),
    };
    let mut aux = || {
        *next += 1;
        VarId(*next)
    };
    let res = match c {
        Con::Lin(terms, r, k) => store.post(rel(terms.iter().map(|(c, i)| (*c, v(*i))).collect(), r, *k)),
        Con::Mod(x, m, r, k) => {
            let a = aux();
            if !store.post(FdConstraint::Mod { x: v(*x), m: *m, r: a }).unwrap() {
                return false;
            }
            store.post(rel(vec![(1, a)], r, *k))
        }
        Con::Abs(x, y, r, k) => {
            let (d, a) = (aux(), aux());
            if !store
                .post(FdConstraint::LinEq(vec![(1, v(*x)), (-1, v(*y)), (-1, d)], 0))
                .unwrap()
            {
                return false;
            }
            if !store.post(FdConstraint::Abs { x: d, y: a }).unwrap() {
                return false;
            }
            store.post(rel(vec![(1, a)], r, *k))
        }
        Con::Or(..) => unreachable!(),
    };
    res.unwrap()
}

#[test]
fn propagation_is_sound() {
    for seed in 2000..2400 {
        let csp = random_csp(seed, false);
        let sols = brute(&csp);
        let mut store = FdStore::new();
        let mut next = 100;
        let mut ok = true;
        for (i, (lo, hi)) in csp.doms.iter().enumerate() {
            ok &= store.restrict(VarId(i as u32), &FdDomain::range(*lo, *hi));
        }
        for c in &csp.cons {
            ok = ok && post_store(&mut store, c, &mut next);
        }
        if !ok {
            assert!(
                sols.is_empty(),
                "seed {seed}: propagation failed on a satisfiable instance"
            );
            continue;
        }
        for s in &sols {
            for (i, val) in s.iter().enumerate() {
                assert!(
                    store.domain(VarId(i as u32)).unwrap().contains(*val),
                    "seed {seed}: pruned {val} from X{i}"
                );
            }
        }
    }
}

#[test]
fn backtrack_integrity() {
    for seed in 3000..3100 {
        let csp = random_csp(seed, false);
        let mut store = FdStore::new();
        for (i, (lo, hi)) in csp.doms.iter().enumerate() {
            store.restrict(VarId(i as u32), &FdDomain::range(*lo, *hi));
        }
        let mark = store.mark();
        let before: Vec<Option<FdDomain>> = (0..8).map(|i| store.domain(VarId(i)).cloned()).collect();
        let mut next = 100;
        for c in &csp.cons {
            if !post_store(&mut store, c, &mut next) {
                break;
            }
        }
        let _ = store.fix(VarId(0), csp.doms[0].1);
        store.restore(mark);
        let after: Vec<Option<FdDomain>> = (0..8).map(|i| store.domain(VarId(i)).cloned()).collect();
        assert_eq!(before, after, "seed {seed}");
        assert_eq!(store.constraint_count(), 0);
    }
}

// ------------------------------------------------ rationals vs Gaussian

fn gauss_jordan(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

struct System {
    rows: Vec<(Vec<i64>, i64)>,
    solution: Vec<BigRational>,
}

fn random_system(rng: &mut ChaCha8Rng) -> System {
    loop {
        let n = rng.random_range(1..=6);
        let rows: Vec<(Vec<i64>, i64)> = (0..n)
            .map(|_| {
                (
                    (0..n).map(|_| rng.random_range(-9..=9)).collect(),
                    rng.random_range(-20..=20),
                )
            })
            .collect();
        let aug = rows
            .iter()
            .map(|(cs, k)| {
                cs.iter()
                    .map(|c| BigRational::from_integer(BigInt::from(*c)))
                    .chain(std::iter::once(BigRational::from_integer(BigInt::from(*k))))
                    .collect()
            })
            .collect();
        if let Some(solution) = gauss_jordan(aug) {
            return System { rows, solution };
        }
    }
}

fn row_text(cs: &[i64], k: i64) -> String {
    let lhs: Vec<String> = cs.iter().enumerate().map(|(i, c)| format!("({c})*X{i}")).collect();
    format!("{} = {k}", lhs.join(" + "))
}

/// Posts rows one block per entry of `order` and returns the residue.
fn solve_rows(sys: &System, blocks: &[Vec<usize>]) -> BTreeMap<VarId, BigRational> {
    let n = sys.solution.len();
    let names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let mut b = Bindings::new();
    let mut store = RStore::new();
    let mut vars: Option<Vec<VarId>> = None;
    for block in blocks {
        let body: Vec<String> = block.iter().map(|&r| row_text(&sys.rows[r].0, sys.rows[r].1)).collect();
        // every query mentions all variables so ids line up across blocks
        let q = parse_query(&format!("{{{}}}, f({})", body.join(", "), names.join(","))).unwrap();
        if vars.is_none() {
            b.fresh_block(q.nvars);
        }
        let ids: Vec<VarId> = names.iter().map(|n| q.var(n).unwrap()).collect();
        let vs = vars.get_or_insert_with(|| ids.clone());
        assert_eq!(vs, &ids);
        let goal = &q.goal.args()[0];
        assert!(r_post(goal, &b, &mut store).unwrap());
    }
    store
        .residue(vars.as_ref().unwrap())
        .expect("nonsingular system must be determined")
}

#[test]
fn rational_solver_matches_gaussian_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..250 {
        let sys = random_system(&mut rng);
        let n = sys.rows.len();
        let got = solve_rows(&sys, &[(0..n).collect()]);
        let got: Vec<BigRational> = got.into_values().collect();
        assert_eq!(got, sys.solution, "case {case}");
    }
}

#[test]
fn incremental_equals_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let sys = random_system(&mut rng);
        let n = sys.rows.len();
        let batch = solve_rows(&sys, &[(0..n).collect()]);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let single: Vec<Vec<usize>> = order.iter().map(|&r| vec![r]).collect();
        assert_eq!(solve_rows(&sys, &single), batch, "case {case}");
    }
}

#[test]
fn engine_rational_blocks_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..50 {
        let sys = random_system(&mut rng);
        let body: Vec<String> = sys.rows.iter().map(|(cs, k)| row_text(cs, *k)).collect();
        let sols = run_all("", &format!("{{{}}}", body.join(", "))).unwrap();
        assert_eq!(sols.len(), 1);
        for (i, want) in sys.solution.iter().enumerate() {
            let got = sols[0].get(&format!("X{i}")).unwrap();
            assert_eq!(got, &Term::rational(want.clone()), "case {case}");
        }
    }
}

// ------------------------------------------------- backtracking purity

#[test]
fn exhausted_queries_leave_no_trace() {
    let src = "p(1). p(2). p(3).
               q(X, Y) :- p(X), Y in 0..X, Y #\\= 1.
               r(X) :- {X = 2 * Y}, p(Y).";
    let m = Machine::new(consult(&parse_program(src).unwrap()).unwrap());
    for q in [
        "p(X)",
        "q(X, Y)",
        "r(X)",
        "q(X, Y), X > 5",
        "findall(Y, q(_, Y), L)",
        "\\+ q(9, _)",
        "r(X), !",
    ] {
        let mut sols = m.solve_str(q).unwrap();
        for s in sols.by_ref() {
            s.unwrap();
        }
        assert!(sols.is_pristine(), "{q}");
    }
}
