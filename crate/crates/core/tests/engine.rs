use std::time::{Duration, Instant};

use deduce_core::engine::run_all;
use deduce_core::error::BudgetKind;
use deduce_core::write::term_to_string;
use deduce_core::{consult, parse_program, Budget, EngineError, Machine, Term};

const FOUR_DIGIT: &str = "problem(Number):-
Number #= 1000 * Digit4 + 100 * Digit3 + 10 * Digit2 + Digit1,
Digit1 #>= 0, Digit1 #< 10,
Digit2 #>= 0, Digit2 #< 10,
Digit3 #>= 0, Digit3 #< 10,
Digit4 #> 0, Digit4 #< 10,
Digit1 mod 2 #\\= 0,
Digit1 + Digit2 + Digit3 + Digit4 #= 20,
Digit4 #> Digit3,
Digit3 #> Digit2,
Digit2 #> Digit1,
(4 * Digit1 #= Digit2; 4 * Digit1 #= Digit3; 4 * Digit1 #= Digit4;4 * Digit2 #= Digit1;4 * Digit2 #= Digit3; 4 * Digit2 #= Digit4; 4 * Digit3 #= Digit1; 4 * Digit3 #= Digit2;4 * Digit3 #= Digit4;4 * Digit4 #= Digit1; 4 * Digit4 #= Digit2; 4 * Digit4 #= Digit3),
abs(Digit3 - Digit2) #> 3.
";

fn machine(src: &str) -> Machine {
    Machine::new(consult(&parse_program(src).unwrap()).unwrap())
}

/// Renders every answer as `Name=Value` pairs joined by commas.
fn answers(src: &str, query: &str) -> Vec<String> {
    run_all(src, query)
        .unwrap_or_else(|e| panic!("{query}: {e}"))
        .iter()
        .map(|s| {
            s.bindings
                .iter()
                .filter(|(n, _)| !n.starts_with('_'))
                .map(|(n, t)| format!("{n}={}", term_to_string(t)))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

fn first_error(src: &str, query: &str) -> EngineError {
    let m = machine(src);
    for r in m.solve_str(query).unwrap() {
        if let Err(e) = r {
            return e;
        }
    }
    panic!("{query}: expected an error");
}

fn count(src: &str, query: &str) -> usize {
    run_all(src, query).unwrap().len()
}

#[test]
fn four_digit_program_has_one_answer() {
    let start = Instant::now();
    let m = machine(FOUR_DIGIT);
    let mut sols = m.solve_str("problem(N)").unwrap();
    let all: Vec<_> = sols.by_ref().collect::<Result<_, _>>().unwrap();
    assert_eq!(all.len(), 1);
    assert_eq!(all[0].get("N"), Some(&Term::int(9821)));
    assert!(sols.is_pristine());
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn four_digit_with_explicit_labeling() {
    let src = format!(
        "{}digits(N, [D4,D3,D2,D1]) :- [D1,D2,D3,D4] ins 0..9, D4 #> 0,
         N #= 1000*D4 + 100*D3 + 10*D2 + D1, label([D4,D3,D2,D1]).\n",
        FOUR_DIGIT
    );
    assert_eq!(answers(&src, "problem(N), digits(N, Ds)"), vec!["N=9821,Ds=[9,8,2,1]"]);
}

#[test]
fn member_order_and_cut() {
    assert_eq!(answers("", "member(X, [1,2,3])"), vec!["X=1", "X=2", "X=3"]);
    assert_eq!(answers("", "member(X, [1,2,3]), !"), vec!["X=1"]);
}

#[test]
fn cut_is_local_to_clause() {
    let src = "t(X) :- member(X, [a,b]), !.
               t(c).
               u(X) :- t(X).
               u(d).";
    assert_eq!(answers(src, "u(X)"), vec!["X=a", "X=d"]);
}

#[test]
fn cut_inside_call_is_opaque() {
    assert_eq!(answers("", "call((member(X,[1,2]), !)) ; X = 9"), vec!["X=1", "X=9"]);
    assert_eq!(answers("", "member(X,[1,2]), call(!)"), vec!["X=1", "X=2"]);
}

#[test]
fn if_then_else_and_negation() {
    assert_eq!(
        answers("", "( member(X,[1,2,3]), X > 1 -> Y = X ; Y = none )"),
        vec!["X=2,Y=2"]
    );
    assert_eq!(answers("", "( fail -> Y = a ; Y = b )"), vec!["Y=b"]);
    assert_eq!(answers("", "( true -> Y = a )"), vec!["Y=a"]);
    assert_eq!(count("", "( fail -> true )"), 0);
    assert_eq!(count("", "\\+ member(4, [1,2,3])"), 1);
    assert_eq!(count("", "\\+ member(2, [1,2,3])"), 0);
    assert_eq!(answers("", "\\+ X = 1, Y = 2"), Vec::<String>::new());
    let sols = run_all("", "\\+ \\+ X = 1, Y = X").unwrap();
    assert!(matches!(sols[0].get("X"), Some(Term::Var(_))));
}

#[test]
fn unknown_predicate_is_existence_error() {
    let e = first_error("", "undefined_pred(a)");
    assert_eq!(
        e,
        EngineError::Existence {
            name: "undefined_pred".into(),
            arity: 1
        }
    );
}

#[test]
fn dynamic_declaration_makes_predicate_fail_quietly() {
    assert_eq!(count(":- dynamic seen/1.\n", "seen(x)"), 0);
}

#[test]
fn redefining_a_builtin_is_rejected() {
    let err = consult(&parse_program("X is Y :- X = Y.").unwrap()).unwrap_err();
    assert!(matches!(err, EngineError::BuiltinRedefinition { ref name, arity: 2 } if name == "is"));
}

#[test]
fn library_predicates_can_be_overridden() {
    let src = "member(X, [X]).";
    assert_eq!(answers(src, "member(X, [1,2])"), Vec::<String>::new());
    assert_eq!(answers(src, "member(X, [7])"), vec!["X=7"]);
}

#[test]
fn arithmetic_is_exact() {
    assert_eq!(answers("", "X is 7 mod 2"), vec!["X=1"]);
    assert_eq!(answers("", "X is -7 mod 2"), vec!["X=1"]);
    assert_eq!(answers("", "X is 7 mod -2"), vec!["X=-1"]);
    assert_eq!(answers("", "X is -7 rem 2"), vec!["X=-1"]);
    assert_eq!(answers("", "X is -7 // 2"), vec!["X=-4"]);
    assert_eq!(answers("", "X is abs(2 - 8)"), vec!["X=6"]);
    assert_eq!(answers("", "X is 1/3 + 1/6"), vec!["X=1 rdiv 2"]);
    assert_eq!(answers("", "X is 6/3"), vec!["X=2"]);
    assert_eq!(answers("", "X is max(3, 1/2) + min(4, 5)"), vec!["X=7"]);
    assert_eq!(answers("", "X is 2 ** 100"), vec!["X=1267650600228229401496703205376"]);
    assert_eq!(answers("", "X is 0.5 + 1"), vec!["X=3 rdiv 2"]);
    assert_eq!(count("", "1 =:= 2/2"), 1);
    assert_eq!(count("", "1/2 < 2/3"), 1);
    assert_eq!(count("", "3 =\\= 3"), 0);
    assert_eq!(first_error("", "X is 1/0"), EngineError::ZeroDivisor);
    assert!(matches!(first_error("", "X is Y + 1"), EngineError::Instantiation(_)));
    assert!(matches!(first_error("", "X is foo + 1"), EngineError::Type { .. }));
}

#[test]
fn list_builtins() {
    assert_eq!(
        answers("", "append(X, Y, [1,2])"),
        vec!["X=[],Y=[1,2]", "X=[1],Y=[2]", "X=[1,2],Y=[]"]
    );
    assert_eq!(answers("", "length([a,b,c], N)"), vec!["N=3"]);
    let sols = run_all("", "length(L, 2)").unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0].get("L").unwrap().list_items().0.len(), 2);
    let sols = run_all("", "length(L, N), N >= 2, !").unwrap();
    assert_eq!(sols[0].get("N"), Some(&Term::int(2)));
    assert_eq!(answers("", "nth0(1, [a,b,c], X)"), vec!["X=b"]);
    assert_eq!(answers("", "nth1(1, [a,b,c], X)"), vec!["X=a"]);
    assert_eq!(answers("", "nth1(I, [a,b], X)"), vec!["I=1,X=a", "I=2,X=b"]);
    assert_eq!(answers("", "between(1, 3, X)"), vec!["X=1", "X=2", "X=3"]);
    assert_eq!(count("", "between(1, 3, 5)"), 0);
    assert_eq!(answers("", "msort([b,a,c,a], L)"), vec!["L=[a,a,b,c]"]);
    assert_eq!(answers("", "sort([b,a,c,a], L)"), vec!["L=[a,b,c]"]);
    let sols = run_all("", "findall(X-Y, member(X-Y, [1-a, 2-b]), L)").unwrap();
    assert_eq!(term_to_string(sols[0].get("L").unwrap()), "[1-a,2-b]");
    assert_eq!(answers("", "findall(_, fail, L)"), vec!["L=[]"]);
    assert_eq!(count("", "forall(member(X, [1,2,3]), X > 0)"), 1);
    assert_eq!(count("", "forall(member(X, [1,2,3]), X > 1)"), 0);
    assert_eq!(answers("", "sum_list([1,2,3], S)"), vec!["S=6"]);
    assert_eq!(answers("", "max_list([1,5,3], S)"), vec!["S=5"]);
    assert_eq!(answers("", "reverse([1,2,3], R)"), vec!["R=[3,2,1]"]);
    assert_eq!(answers("", "last([1,2,3], R)"), vec!["R=3"]);
    assert_eq!(answers("", "numlist(1, 4, R)"), vec!["R=[1,2,3,4]"]);
    assert_eq!(answers("", "maplist(succ, [1,2], R)"), vec!["R=[2,3]"]);
    assert_eq!(answers("", "foldl(plus, [1,2,3], 0, S)"), vec!["S=6"]);
    assert_eq!(answers("", "aggregate_all(count, member(_, [a,b]), C)"), vec!["C=2"]);
    assert_eq!(answers("", "select(b, [a,b,c], R)"), vec!["R=[a,c]"]);
    assert_eq!(answers("big(X) :- X > 1.", "exclude(big, [1,2,3], R)"), vec!["R=[1]"]);
    assert_eq!(answers("big(X) :- X > 1.", "include(big, [1,2,3], R)"), vec!["R=[2,3]"]);
}

#[test]
fn term_inspection() {
    assert_eq!(answers("", "functor(f(a,b), N, A)"), vec!["N=f,A=2"]);
    assert_eq!(answers("", "functor(T, g, 2), T = g(1, 2)"), vec!["T=g(1,2)"]);
    assert_eq!(answers("", "arg(2, f(a,b), X)"), vec!["X=b"]);
    assert_eq!(answers("", "f(a, b) =.. L"), vec!["L=[f,a,b]"]);
    assert_eq!(answers("", "T =.. [g, 1]"), vec!["T=g(1)"]);
    assert_eq!(answers("", "atom_length(hello, N)"), vec!["N=5"]);
    assert_eq!(answers("", "atom_chars(X, [h, i])"), vec!["X=hi"]);
    assert_eq!(answers("", "atom_number('42', N)"), vec!["N=42"]);
    assert_eq!(answers("", "compare(O, 1, a)"), vec!["O=<"]);
    assert_eq!(count("", "f(X) == f(X)"), 1);
    assert_eq!(count("", "f(X) == f(Y)"), 0);
    assert_eq!(count("", "a \\= b"), 1);
    assert_eq!(count("", "X \\= b"), 0);
    assert_eq!(count("", "1 @< a, a @< f(x)"), 1);
}

#[test]
fn occurs_check_flag() {
    let m = machine("");
    let n = m.solve_str("X = f(X)").unwrap().count();
    assert_eq!(n, 1);
    let m = m.with_occurs_check(true);
    let n = m.solve_str("X = f(X)").unwrap().count();
    assert_eq!(n, 0);
    assert_eq!(count("", "unify_with_occurs_check(X, f(X))"), 0);
}

#[test]
fn step_budget_is_distinct_from_failure() {
    let m = machine("loop :- loop.").with_budget(Budget::new(10_000, Duration::from_secs(5)).unwrap());
    let r: Vec<_> = m.solve_str("loop").unwrap().collect();
    assert_eq!(r, vec![Err(EngineError::BudgetExceeded(BudgetKind::Steps))]);
}

#[test]
fn time_budget() {
    let m = machine("loop :- loop.").with_budget(Budget::new(u64::MAX, Duration::from_millis(50)).unwrap());
    let r: Vec<_> = m.solve_str("loop").unwrap().collect();
    assert_eq!(r, vec![Err(EngineError::BudgetExceeded(BudgetKind::Time))]);
}

#[test]
fn budget_must_be_positive() {
    assert!(Budget::new(0, Duration::from_secs(1)).is_err());
    assert!(Budget::new(1, Duration::ZERO).is_err());
}

#[test]
fn output_builtins() {
    let m = machine("");
    let mut sols = m
        .solve_str("write(f('A', [1,2])), nl, writeq('A'), format(\"~w-~a~n\", [x, y])")
        .unwrap();
    assert!(sols.next().unwrap().is_ok());
    assert_eq!(sols.output(), "f(A,[1,2])\n'A'x-y\n");
}

#[test]
fn fd_basics() {
    assert_eq!(
        answers("", "X in 0..9, X mod 2 #\\= 0, label([X])"),
        vec!["X=1", "X=3", "X=5", "X=7", "X=9"]
    );
    assert_eq!(count("", "X #> Y, Y #> X"), 0);
    assert_eq!(
        answers("", "[X,Y] ins 0..1, label([X,Y])"),
        vec!["X=0,Y=0", "X=0,Y=1", "X=1,Y=0", "X=1,Y=1"]
    );
    assert_eq!(count("", "X in 0..9, X #> 9, label([X])"), 0);
    assert_eq!(
        answers("", "[X,Y] ins 0..2, X #< Y, labeling([down], [X,Y])"),
        vec!["X=1,Y=2", "X=0,Y=2", "X=0,Y=1"]
    );
    assert_eq!(first_error("", "X #> 0, label([X])"), EngineError::UnboundedDomain);
    assert!(matches!(
        first_error("", "X*Y #= 6"),
        EngineError::NonLinearUnsupported(_)
    ));
}

#[test]
fn fd_binding_through_unification() {
    assert_eq!(count("", "X in 0..3, X = 5"), 0);
    assert_eq!(answers("", "X in 0..3, X = 2"), vec!["X=2"]);
    assert_eq!(count("", "[X,Y] ins 0..5, X #= Y + 4, X = Y"), 0);
    assert!(matches!(
        first_error("", "X in 0..5, X = f(a)"),
        EngineError::Type { .. }
    ));
    assert_eq!(answers("", "X in 1..3, Y in 3..5, X = Y"), vec!["X=3,Y=3"]);
}

#[test]
fn auto_label_leaves_unbounded_residue() {
    let sols = run_all("", "X #> 3").unwrap();
    assert_eq!(sols.len(), 1);
    assert!(sols[0].is_constrained("X"));
    assert!(!sols[0].auto_labeled);
    let sols = run_all("", "X in 1..2").unwrap();
    assert_eq!(sols.len(), 2);
    assert!(sols.iter().all(|s| s.auto_labeled));
}

#[test]
fn auto_label_can_be_disabled() {
    let m = machine("").with_auto_label(false);
    let sols: Vec<_> = m.solve_str("X in 1..2").unwrap().collect::<Result<_, _>>().unwrap();
    assert_eq!(sols.len(), 1);
    assert!(sols[0].is_constrained("X"));
}

#[test]
fn rational_blocks() {
    assert_eq!(answers("", "{B = 2, A = B + 1}"), vec!["B=2,A=3"]);
    assert_eq!(
        answers("", "{A + 3 = 2*(B - 3), B + 2 = (A - 2) + 1}"),
        vec!["A=15,B=12"]
    );
    assert_eq!(count("", "{X = 1, X = 2}"), 0);
    assert_eq!(answers("", "{X = 1/3, Y = 3*X}"), vec!["X=1 rdiv 3,Y=1"]);
    assert_eq!(count("", "{X >= 0, X =< -1}"), 0);
    assert_eq!(count("", "{X + Y =< 4, X >= 3, Y >= 2}"), 0);
    assert_eq!(answers("", "{X >= 0}, {X = 5}"), vec!["X=5"]);
    let sols = run_all("", "{X + Y = 3}").unwrap();
    assert_eq!(sols.len(), 1);
    assert!(sols[0].is_constrained("X") && sols[0].is_constrained("Y"));
}

#[test]
fn hash_relations_route_to_rationals() {
    assert_eq!(answers("", "X #= 7 / 2"), vec!["X=7 rdiv 2"]);
    assert_eq!(answers("", "{Y = 1/2}, X #= 2 * Y"), vec!["Y=1 rdiv 2,X=1"]);
    assert!(matches!(
        first_error("", "X in 0..9, {Y = 1/2}, X #= Y"),
        EngineError::TypeMix(_)
    ));
}

#[test]
fn age_problem_in_rational_form() {
    let src = "age(M) :- {F = 30 + M/2, S = 25 + 2*M/3, D = 7 + 5*M/6, M + F + S + D = 116}.";
    assert_eq!(answers(src, "age(M)"), vec!["M=18"]);
}

#[test]
fn backtracking_restores_stores() {
    let m = machine(FOUR_DIGIT);
    for q in ["problem(N)", "X in 0..3, label([X])", "{X = 2}", "{X = 1}, fail ; true"] {
        let mut s = m.solve_str(q).unwrap();
        for r in s.by_ref() {
            r.unwrap();
        }
        assert!(s.is_pristine(), "{q}");
    }
}

#[test]
fn determinism() {
    let a = answers(FOUR_DIGIT, "problem(N) ; member(N, [1,2])");
    let b = answers(FOUR_DIGIT, "problem(N) ; member(N, [1,2])");
    assert_eq!(a, b);
}

#[test]
fn database_shape() {
    let p = parse_program(FOUR_DIGIT).unwrap();
    assert_eq!(p.clauses.len(), 1);
    assert_eq!(p.clauses[0].body.len(), 16);
    let db = consult(&p).unwrap();
    assert_eq!(db.user_predicates().len(), 1);
    assert!(consult(&parse_program("").unwrap())
        .unwrap()
        .user_predicates()
        .is_empty());
}
