//! Built-in problems with hand-written reference programs.
//!
//! Every gold below is frozen from the oracle instance returned by
//! [`certificate`]; the test suite recomputes each one and runs each
//! reference program through the engine.

use crate::answer::Gold;
use crate::oracle::cinema::{cinema, FillOrder};
use crate::oracle::csp::{csp_answers, CspInstance, CspVar};
use crate::oracle::linear::{linear_answer, LinearInstance};
use crate::oracle::sumitup::{sum_it_up, SumRule};
use crate::oracle::OracleError;
use crate::problem::{Category, ProblemRecord};

pub const FOUR_DIGIT_PROGRAM: &str = "problem(Number):-
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

const FOUR_DIGIT: &str = "I am a 4 digit number. My rightmost digit is not divisible by 2. The sum of my \
digits is 20, and all my digits are in strictly decreasing order from left to right. One of my digits is 4 \
times one of my other digits, and the difference between my 2 middle digits is more than 3. What number am I?";

const BIRDS_2: &str = "There are 2 trees (\"A\", \"B\") in a garden, and there are some birds in each tree. \
The birds in tree A tell the birds in tree B that if 3 of you come to us, then our population would be twice \
the population of tree B. And birds in tree B tell birds in tree A that if 2 of you come to us, then our \
population would be more than the population in tree A by 1 bird. What is the the number of birds in the 2 trees?";

const BIRDS_3: &str = "There are 3 trees (\"A\", \"B\", \"C\") in a garden, and there are some birds in each \
tree. The birds in tree A tell the other birds that if 2 birds from C and 1 bird from B come to our tree, then \
our population would be double the population of birds in C. Birds in B think if the birds do this move, then \
the population of A would be equal to their current population. Birds in B suggest another move, if 1 bird \
from A and 3 birds from C come to our tree, then our population would be double the population of A. What is \
the the number of birds in the 3 trees?";

const BIRDS_4: &str = "There are 4 trees (\"A\", \"B\", \"C\", \"D\") in a garden, and there are some birds in \
each tree. The birds in D tell other birds that if 1 bird from C and 1 bird from A comes to us, then our \
population would be half the population of A. Birds in A and C think that if they do this move, then the sum \
of their population would be equal to the population of birds in B. Birds in B suggest another move, if 5 \
birds from C and 5 birds from D come to our tree, then our population would be twice the population of tree A. \
Birds in C think that if the birds do this move, there would be 2 more birds in their tree relative to the \
number of birds in tree D. What is the the number of birds in the 4 trees?";

const AGE: &str = "When I was half my current age, my father was 30. When I was 1/3 my current age, my mother \
was 25. And when I was 1/6 of my current age, my sister was 7. If the sum of my age, my sister's age, my \
father's age, and my mother's age is 116, then how old am I now?";

const LINE: &str = "In a line to enter a cinema, 4 people are standing between Bob and Alex. Chad's index in \
the line is 1 after Bob's, he's standing right behind Bob considering the order of people left to right. Frank \
is right behind Alex. Sam is right in front of Bob. There are 2 people between Sam and Frank. If Bob is in the \
7th person in the line, counting left to right, what is the number of Alex?";

const CINEMA: &str = "There's a cinema with 12 seats organized in 3 rows and 4 columns. Due to covid there's a \
policy that a seat can be filled only if none of the seats right next to it in the same column or the same row \
are not filled. If we place a person in the seat in the second column of the first row and then start to fill \
the seats left to right, row by row, starting row with 1, how many people can be seated in the cinema in total?";

const SUM_PLAIN: &str = "In the \"sum it up\" game, there are 10 numbered squares and a queue of numbers, called \
the waitlist. In this game the player must remove the first number on the waitlist and put it in the first \
square numbered 0 from the left. If the squares start as 1, -2, 3, 0, 4, 0, -1, -1, 0, 0 and the waitlist is \
7, 3, -4, -2, what's the final sum of all square numbers after the waitlist is emptied?";

const SUM_CLEAR: &str = "In the \"sum it up\" game, there are 10 numbered squares and a queue of numbers, called \
the waitlist. Each round, the first number in the waitlist is removed and placed in the first 0 square from the \
left. If the number in the square before the 0 square is equal to the waitlist number, then the waitlist number \
clears out, and the 0 in the 0 square remains unchanged in that round. Given the squares start as 1, -2, 3, 0, \
4, 0, -1, -1, 0, 0 and the waitlist is 3, -2, 4, -1, what's the final sum of all square numbers after the \
waitlist is emptied?";

const SUM_ZERO: &str = "In the \"sum it up\" game, there are 10 numbered squares and a waitlist of numbers. Each \
round involves removing the first waitlist number and placing it in the first 0 square from the left. If the \
waitlist number equals the sum of the numbers in the squares before and after the 0 square, then all three \
squares become 0. Given the squares start as 1, -2, 3, 0, 4, 0, -1, -1, 0, 0 and the waitlist is 7, 3, -4, -4, \
3, what's the final sum of all square numbers after the waitlist is emptied?";

const BIRDS_2_PROGRAM: &str = "\
% A and B are the current bird counts.
problem(Total) :-
    % 3 birds move from B to A: A doubles what is left in B
    { A + 3 = 2 * (B - 3),
    % 2 birds move from A to B: B exceeds what is left in A by 1
      B + 2 = (A - 2) + 1,
      Total = A + B }.
";

const BIRDS_3_PROGRAM: &str = "\
problem(Total) :-
    % 2 birds from C and 1 from B join A: A doubles what is left in C
    { A + 2 + 1 = 2 * (C - 2),
    % after that move A equals the current count of B
      A + 2 + 1 = B,
    % 1 bird from A and 3 from C join B: B doubles what is left in A
      B + 1 + 3 = 2 * (A - 1),
      Total = A + B + C }.
";

const BIRDS_4_PROGRAM: &str = "\
problem(Total) :-
    % 1 bird each from C and A join D: D is half of what is left in A
    { D + 1 + 1 = (A - 1) / 2,
    % after that move A and C together equal B
      (A - 1) + (C - 1) = B,
    % 5 birds each from C and D join B: B doubles A
      B + 5 + 5 = 2 * A,
    % after that move C has 2 more than D
      C - 5 = (D - 5) + 2,
      Total = A + B + C + D }.
";

const AGE_PROGRAM: &str = "\
% Each relative is as much older than me as the time elapsed since the
% remembered moment.
problem(Me) :-
    { Father = 30 + Me / 2,
      Mother = 25 + 2 * Me / 3,
      Sister = 7 + 5 * Me / 6,
      Me + Father + Mother + Sister = 116 }.
";

const LINE_PROGRAM: &str = "\
problem(Alex) :-
    [Bob, Alex, Chad, Frank, Sam] ins 1..20,
    Bob #= 7,
    % 4 people between Bob and Alex
    abs(Bob - Alex) #= 5,
    Chad #= Bob + 1,
    Frank #= Alex + 1,
    Sam #= Bob - 1,
    % 2 people between Sam and Frank
    abs(Sam - Frank) #= 3.
";

const CINEMA_PROGRAM: &str = "\
problem(Count) :-
    findall(R-C, (between(1, 3, R), between(1, 4, C)), Seats),
    fill(Seats, [1-2], Occupied),
    length(Occupied, Count).

% A free seat is taken unless an occupied seat shares an edge with it.
fill([], Occ, Occ).
fill([S|Ss], Occ0, Occ) :-
    (   \\+ member(S, Occ0),
        \\+ (member(T, Occ0), adjacent(S, T))
    ->  fill(Ss, [S|Occ0], Occ)
    ;   fill(Ss, Occ0, Occ)
    ).

adjacent(R-C1, R-C2) :- abs(C1 - C2) =:= 1.
adjacent(R1-C, R2-C) :- abs(R1 - R2) =:= 1.
";

const SUM_COMMON: &str = "\
play(Squares, [], Squares).
play(Squares, [W|Ws], Final) :-
    place(Squares, W, Next),
    play(Next, Ws, Final).

set_nth0(0, [_|T], X, [X|T]) :- !.
set_nth0(I, [H|T], X, [H|T2]) :-
    I1 is I - 1,
    set_nth0(I1, T, X, T2).
";

const SUM_PLAIN_PLACE: &str = "\
place(Squares, W, Next) :-
    nth0(I, Squares, 0), !,
    set_nth0(I, Squares, W, Next).
";

const SUM_CLEAR_PLACE: &str = "\
% the number is dropped when the square before the first 0 holds it
place(Squares, W, Next) :-
    nth0(I, Squares, 0), !,
    (   I > 0, I0 is I - 1, nth0(I0, Squares, Before), Before =:= W
    ->  Next = Squares
    ;   set_nth0(I, Squares, W, Next)
    ).
";

const SUM_ZERO_PLACE: &str = "\
% a missing neighbor at either end counts as 0
place(Squares, W, Next) :-
    nth0(I, Squares, 0), !,
    length(Squares, N),
    ( I > 0 -> I0 is I - 1, nth0(I0, Squares, Before) ; Before = 0 ),
    ( I < N - 1 -> I2 is I + 1, nth0(I2, Squares, After) ; After = 0 ),
    (   W =:= Before + After
    ->  Lo is max(0, I - 1), Hi is min(N - 1, I + 1),
        zero_between(Squares, 0, Lo, Hi, Next)
    ;   set_nth0(I, Squares, W, Next)
    ).

zero_between([], _, _, _, []).
zero_between([X|Xs], K, Lo, Hi, [Y|Ys]) :-
    ( K >= Lo, K =< Hi -> Y = 0 ; Y = X ),
    K1 is K + 1,
    zero_between(Xs, K1, Lo, Hi, Ys).
";

const START_SQUARES: [i64; 10] = [1, -2, 3, 0, 4, 0, -1, -1, 0, 0];

fn sum_program(waitlist: &[i64], place: &str) -> String {
    let list = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    format!(
        "problem(Sum) :-\n    play([{}], [{}], Final),\n    sum_list(Final, Sum).\n\n{SUM_COMMON}\n{place}",
        list(&START_SQUARES),
        list(waitlist)
    )
}

fn record(
    id: &str,
    category: Category,
    statement: &str,
    gold: i64,
    entanglement: Option<u32>,
    program: String,
) -> ProblemRecord {
    ProblemRecord {
        id: id.to_owned(),
        category,
        statement: statement.to_owned(),
        gold: Gold::Int(gold),
        entanglement,
        entry: None,
        reference_program: Some(program),
    }
}

/// The built-in problems, in a fixed order.
pub fn fixtures() -> Vec<ProblemRecord> {
    use Category::*;
    vec![
        record(
            "cs-four-digit",
            ConstraintSatisfaction,
            FOUR_DIGIT,
            9821,
            None,
            FOUR_DIGIT_PROGRAM.into(),
        ),
        record("mwp-birds-2", MathWord, BIRDS_2, 27, Some(2), BIRDS_2_PROGRAM.into()),
        record("mwp-birds-3", MathWord, BIRDS_3, 29, Some(3), BIRDS_3_PROGRAM.into()),
        record("mwp-birds-4", MathWord, BIRDS_4, 47, Some(4), BIRDS_4_PROGRAM.into()),
        record("mwp-age", MathWord, AGE, 18, Some(4), AGE_PROGRAM.into()),
        record(
            "cs-cinema-line",
            ConstraintSatisfaction,
            LINE,
            2,
            None,
            LINE_PROGRAM.into(),
        ),
        record(
            "ai-cinema-seats",
            AlgorithmicInstructions,
            CINEMA,
            6,
            Some(5),
            CINEMA_PROGRAM.into(),
        ),
        record(
            "ai-sum-it-up-plain",
            AlgorithmicInstructions,
            SUM_PLAIN,
            8,
            None,
            sum_program(&[7, 3, -4, -2], SUM_PLAIN_PLACE),
        ),
        record(
            "ai-sum-it-up-clear",
            AlgorithmicInstructions,
            SUM_CLEAR,
            1,
            Some(2),
            sum_program(&[3, -2, 4, -1], SUM_CLEAR_PLACE),
        ),
        record(
            "ai-sum-it-up-zero",
            AlgorithmicInstructions,
            SUM_ZERO,
            -3,
            Some(3),
            sum_program(&[7, 3, -4, -4, 3], SUM_ZERO_PLACE),
        ),
    ]
}

/// Oracle instance that independently determines a fixture's gold.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Csp(CspInstance),
    Linear(LinearInstance),
    SumItUp {
        squares: Vec<i64>,
        waitlist: Vec<i64>,
        rule: SumRule,
    },
    Cinema {
        rows: usize,
        cols: usize,
        pre_seated: Vec<(usize, usize)>,
        order: FillOrder,
    },
}

impl Certificate {
    pub fn oracle_name(&self) -> &'static str {
        match self {
            Certificate::Csp(_) => "csp",
            Certificate::Linear(_) => "linear",
            Certificate::SumItUp { .. } => "sumitup",
            Certificate::Cinema { .. } => "cinema",
        }
    }

    /// Runs the oracle. A CSP certificate must have exactly one answer and a
    /// linear one an integral answer.
    pub fn gold(&self) -> Result<Gold, OracleError> {
        match self {
            Certificate::Csp(inst) => match csp_answers(inst)?.as_slice() {
                [v] => Ok(Gold::Int(*v as i64)),
                other => Err(OracleError::InvalidInstance(format!(
                    "{} answers, expected one",
                    other.len()
                ))),
            },
            Certificate::Linear(inst) => {
                let v = linear_answer(inst)?;
                if !v.is_integer() {
                    return Err(OracleError::InvalidInstance(format!("non-integral answer {v}")));
                }
                let i: i64 = v
                    .to_integer()
                    .try_into()
                    .map_err(|_| OracleError::InvalidInstance("answer overflow".into()))?;
                Ok(Gold::Int(i))
            }
            Certificate::SumItUp {
                squares,
                waitlist,
                rule,
            } => sum_it_up(squares, waitlist, *rule).map(Gold::Int),
            Certificate::Cinema {
                rows,
                cols,
                pre_seated,
                order,
            } => cinema(*rows, *cols, pre_seated, *order).map(|n| Gold::Int(n as i64)),
        }
    }
}

fn digit(name: &str, lo: i64) -> CspVar {
    CspVar {
        name: name.into(),
        lo,
        hi: 9,
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// The four-digit puzzle as a brute-force instance.
pub fn four_digit_instance() -> CspInstance {
    let ds = ["d1", "d2", "d3", "d4"];
    let mut multiples = Vec::new();
    for a in ds {
        for b in ds {
            if a != b {
                multiples.push(format!("4 * {a} = {b}"));
            }
        }
    }
    let mut constraints = strings(&[
        "d4 > 0",
        "d1 mod 2 != 0",
        "d1 + d2 + d3 + d4 = 20",
        "d4 > d3",
        "d3 > d2",
        "d2 > d1",
        "abs(d3 - d2) > 3",
    ]);
    constraints.push(multiples.join(" or "));
    CspInstance {
        vars: vec![digit("d4", 0), digit("d3", 0), digit("d2", 0), digit("d1", 0)],
        constraints,
        answer: Some("1000 * d4 + 100 * d3 + 10 * d2 + d1".into()),
    }
}

pub fn certificate(id: &str) -> Option<Certificate> {
    let linear = |eqs: &[&str], answer: &str| {
        Certificate::Linear(LinearInstance {
            equations: strings(eqs),
            answer: Some(answer.into()),
        })
    };
    let sum = |waitlist: &[i64], rule| Certificate::SumItUp {
        squares: START_SQUARES.to_vec(),
        waitlist: waitlist.to_vec(),
        rule,
    };
    Some(match id {
        "cs-four-digit" => Certificate::Csp(four_digit_instance()),
        "mwp-birds-2" => linear(&["a + 3 = 2 * (b - 3)", "b + 2 = (a - 2) + 1"], "a + b"),
        "mwp-birds-3" => linear(
            &["a + 2 + 1 = 2 * (c - 2)", "a + 2 + 1 = b", "b + 1 + 3 = 2 * (a - 1)"],
            "a + b + c",
        ),
        "mwp-birds-4" => linear(
            &[
                "d + 1 + 1 = (a - 1) / 2",
                "(a - 1) + (c - 1) = b",
                "b + 5 + 5 = 2 * a",
                "c - 5 = (d - 5) + 2",
            ],
            "a + b + c + d",
        ),
        "mwp-age" => linear(
            &[
                "father = 30 + me / 2",
                "mother = 25 + 2 * me / 3",
                "sister = 7 + 5 * me / 6",
                "me + father + mother + sister = 116",
            ],
            "me",
        ),
        "cs-cinema-line" => Certificate::Csp(CspInstance {
            vars: ["bob", "alex", "chad", "frank", "sam"]
                .iter()
                .map(|n| CspVar {
                    name: n.to_string(),
                    lo: 1,
                    hi: 20,
                })
                .collect(),
            constraints: strings(&[
                "bob = 7",
                "abs(bob - alex) = 5",
                "chad = bob + 1",
                "frank = alex + 1",
                "sam = bob - 1",
                "abs(sam - frank) = 3",
            ]),
            answer: Some("alex".into()),
        }),
        "ai-cinema-seats" => Certificate::Cinema {
            rows: 3,
            cols: 4,
            pre_seated: vec![(1, 2)],
            order: FillOrder::RowMajor,
        },
        "ai-sum-it-up-plain" => sum(&[7, 3, -4, -2], SumRule::Plain),
        "ai-sum-it-up-clear" => sum(&[3, -2, 4, -1], SumRule::PrevEqualClears),
        "ai-sum-it-up-zero" => sum(&[7, 3, -4, -4, 3], SumRule::NeighborSumZeroes),
        _ => return None,
    })
}
