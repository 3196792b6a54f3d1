//! Seeded instance generators shared by the solver and acceptance tests.
//! Every instance is rendered twice: as engine source and as oracle input.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::time::Duration;

use deduce_core::engine::run_all;
use deduce_core::{Budget, Number, Term};
use deduce_pipeline::eval::{evaluate, EvalOptions};
use deduce_pipeline::fixtures::fixtures;
use deduce_pipeline::oracle::csp::{csp_brute, CspInstance, CspVar};
use deduce_pipeline::oracle::linear::linear_gold;
use deduce_pipeline::oracle::navigate::{gen_navigate, instructions_of};
use deduce_pipeline::provider::{Script, ScriptedProvider};
use deduce_pipeline::{run_candidate, Answer, ExecStatus, Gold, RetryPolicy};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RELS: [(&str, &str); 6] = [
    ("#=", "="),
    ("#\\=", "!="),
    ("#<", "<"),
    ("#=<", "<="),
    ("#>", ">"),
    ("#>=", ">="),
];

/// One constraint in both syntaxes.
#[derive(Debug, Clone)]
pub struct Con {
    pub prolog: String,
    pub oracle: String,
}

#[derive(Debug, Clone)]
pub struct RandomCsp {
    pub domains: Vec<(i64, i64)>,
    pub cons: Vec<Con>,
}

fn var(i: usize) -> (String, String) {
    (format!("X{i}"), format!("x{i}"))
}

fn simple_con(rng: &mut ChaCha8Rng, n: usize) -> Con {
    let (p_rel, o_rel) = RELS[rng.random_range(0..RELS.len())];
    match rng.random_range(0..4) {
        0 => {
            let terms = rng.random_range(1..=n.min(3));
            let (mut p, mut o) = (Vec::new(), Vec::new());
            for _ in 0..terms {
                let c = rng.random_range(-3..=3);
                let (pv, ov) = var(rng.random_range(0..n));
                p.push(format!("({c})*{pv}"));
                o.push(format!("({c})*{ov}"));
            }
            let k = rng.random_range(-10..=15);
            Con {
                prolog: format!("{} {p_rel} {k}", p.join(" + ")),
                oracle: format!("{} {o_rel} {k}", o.join(" + ")),
            }
        }
        1 => {
            let (pa, oa) = var(rng.random_range(0..n));
            let (pb, ob) = var(rng.random_range(0..n));
            Con {
                prolog: format!("{pa} #\\= {pb}"),
                oracle: format!("{oa} != {ob}"),
            }
        }
        2 => {
            let (pa, oa) = var(rng.random_range(0..n));
            let m = rng.random_range(2..=4);
            let r = rng.random_range(0..m);
            Con {
                prolog: format!("{pa} mod {m} {p_rel} {r}"),
                oracle: format!("{oa} mod {m} {o_rel} {r}"),
            }
        }
        _ => {
            let (pa, oa) = var(rng.random_range(0..n));
            let (pb, ob) = var(rng.random_range(0..n));
            let k = rng.random_range(0..=6);
            Con {
                prolog: format!("abs({pa} - {pb}) {p_rel} {k}"),
                oracle: format!("abs({oa} - {ob}) {o_rel} {k}"),
            }
        }
    }
}

/// At most 5 variables over subranges of 0..9 and at most 6 constraints.
pub fn random_csp(seed: u64) -> RandomCsp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=5);
    let domains = (0..n)
        .map(|_| {
            let lo = rng.random_range(0..=9);
            (lo, rng.random_range(lo..=9))
        })
        .collect();
    let cons = (0..rng.random_range(0..=6))
        .map(|_| {
            if rng.random_bool(0.25) {
                let (a, b) = (simple_con(&mut rng, n), simple_con(&mut rng, n));
                Con {
                    prolog: format!("({} ; {})", a.prolog, b.prolog),
                    oracle: format!("({}) or ({})", a.oracle, b.oracle),
                }
            } else {
                simple_con(&mut rng, n)
            }
        })
        .collect();
    RandomCsp { domains, cons }
}

impl RandomCsp {
    pub fn to_instance(&self) -> CspInstance {
        CspInstance {
            vars: self
                .domains
                .iter()
                .enumerate()
                .map(|(i, (lo, hi))| CspVar {
                    name: var(i).1,
                    lo: *lo,
                    hi: *hi,
                })
                .collect(),
            constraints: self.cons.iter().map(|c| c.oracle.clone()).collect(),
            answer: None,
        }
    }

    pub fn to_query(&self) -> String {
        let names: Vec<String> = (0..self.domains.len()).map(|i| var(i).0).collect();
        let mut goals = vec![format!("Vs = [{}]", names.join(","))];
        for (i, (lo, hi)) in self.domains.iter().enumerate() {
            goals.push(format!("X{i} in {lo}..{hi}"));
        }
        goals.extend(self.cons.iter().map(|c| c.prolog.clone()));
        goals.push("label(Vs)".into());
        goals.join(", ")
    }
}

fn int_of(t: &Term) -> i64 {
    match Number::from_term(t) {
        Some(Number::Int(i)) => i64::try_from(i).expect("small label"),
        other => panic!("non-integer label {other:?}"),
    }
}

pub fn fd_solutions(csp: &RandomCsp) -> Result<BTreeSet<Vec<i64>>, String> {
    let sols = run_all("", &csp.to_query())?;
    Ok(sols
        .iter()
        .map(|s| s.get("Vs").unwrap().list_items().0.into_iter().map(int_of).collect())
        .collect())
}

pub fn brute_solutions(csp: &RandomCsp) -> BTreeSet<Vec<i64>> {
    csp_brute(&csp.to_instance()).unwrap().into_iter().collect()
}

/// Checks `count` CSPs from `first_seed`; returns the first mismatch.
pub fn check_fd_equivalence(first_seed: u64, count: u64) -> Result<(), String> {
    for seed in first_seed..first_seed + count {
        let csp = random_csp(seed);
        let got = fd_solutions(&csp).map_err(|e| format!("seed {seed}: {e}"))?;
        let want = brute_solutions(&csp);
        if got != want {
            return Err(format!(
                "seed {seed}: fd {got:?} vs brute {want:?} for {}",
                csp.to_query()
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub rows: Vec<(Vec<i64>, i64)>,
    pub solution: Vec<BigRational>,
}

fn render_row(cs: &[i64], k: i64, name: impl Fn(usize) -> String) -> String {
    let lhs: Vec<String> = cs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| format!("({c})*{}", name(i)))
        .collect();
    format!(
        "{} = {k}",
        if lhs.is_empty() {
            "0".to_string()
        } else {
            lhs.join(" + ")
        }
    )
}

/// Square systems of size at most 6 with coefficients in -9..9, kept only
/// when the oracle finds a unique solution.
pub fn random_system(rng: &mut ChaCha8Rng) -> RandomSystem {
    loop {
        let n = rng.random_range(1..=6);
        let rows: Vec<(Vec<i64>, i64)> = (0..n)
            .map(|_| {
                (
                    (0..n).map(|_| rng.random_range(-9..=9)).collect(),
                    rng.random_range(-30..=30),
                )
            })
            .collect();
        let eqs: Vec<String> = rows
            .iter()
            .map(|(cs, k)| render_row(cs, *k, |i| format!("x{i}")))
            .collect();
        let Ok(sol) = linear_gold(&eqs) else { continue };
        if sol.len() != n {
            continue;
        }
        let solution = (0..n)
            .map(|i| sol.iter().find(|(v, _)| *v == format!("x{i}")).unwrap().1.clone())
            .collect();
        return RandomSystem { rows, solution };
    }
}

impl RandomSystem {
    pub fn to_query(&self) -> String {
        let body: Vec<String> = self
            .rows
            .iter()
            .map(|(cs, k)| render_row(cs, *k, |i| format!("X{i}")))
            .collect();
        let names: Vec<String> = (0..self.rows.len()).map(|i| format!("X{i}")).collect();
        format!("{{{}}}, Vs = [{}]", body.join(", "), names.join(","))
    }
}

pub fn rational_of(t: &Term) -> Option<BigRational> {
    Number::from_term(t).and_then(|n| n.to_rational())
}

/// Checks `count` systems drawn from `seed`; returns the first mismatch.
pub fn check_rational_equivalence(seed: u64, count: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..count {
        let sys = random_system(&mut rng);
        let q = sys.to_query();
        let sols = run_all("", &q).map_err(|e| format!("case {case}: {e}"))?;
        if sols.len() != 1 {
            return Err(format!("case {case}: {} answers for {q}", sols.len()));
        }
        let got: Vec<Option<BigRational>> = sols[0]
            .get("Vs")
            .unwrap()
            .list_items()
            .0
            .into_iter()
            .map(rational_of)
            .collect();
        let want: Vec<Option<BigRational>> = sys.solution.iter().cloned().map(Some).collect();
        if got != want {
            return Err(format!("case {case}: engine {got:?} vs oracle {want:?} for {q}"));
        }
    }
    Ok(())
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact agreement: integers as integers, floats bit for bit.
pub fn exactly_equal(gold: Gold, answer: &Answer) -> bool {
    match (gold, &answer.0) {
        (Gold::Int(g), Number::Int(a)) => *a == BigInt::from(g),
        (Gold::Float(g), Number::Float(a)) => g.to_bits() == a.to_bits(),
        _ => false,
    }
}

/// Runs every generated reference program through the engine.
pub fn check_navigate(seed: u64, n: usize) -> Result<(), String> {
    let problems = gen_navigate(seed, n).map_err(|e| e.to_string())?;
    if problems.len() != n {
        return Err(format!("generated {} of {n}", problems.len()));
    }
    let budget = Budget::new(1_000_000, Duration::from_secs(10)).unwrap();
    for p in &problems {
        let ins = instructions_of(&p.statement).map_err(|e| format!("{}: {e}", p.id))?;
        let oracle = deduce_pipeline::oracle::navigate::navigate_oracle(&ins);
        if oracle != p.gold {
            return Err(format!("{}: stored gold {:?} vs oracle {oracle:?}", p.id, p.gold));
        }
        let r = run_candidate(p.reference_program.as_ref().unwrap(), &p.entry(), budget);
        if r.status != ExecStatus::Ok {
            return Err(format!("{}: {} {}", p.id, r.status, r.detail));
        }
        let answer = r.answer.unwrap();
        if !exactly_equal(oracle, &answer) {
            return Err(format!("{}: engine {answer} vs oracle {oracle:?}", p.id));
        }
    }
    Ok(())
}

/// Expected attempts when each attempt fails independently with `p`,
/// capped at `cap`.
pub fn truncated_geometric_mean(p: f64, cap: u32) -> f64 {
    (1.0 - p.powi(cap as i32)) / (1.0 - p)
}

pub fn truncated_geometric_variance(p: f64, cap: u32) -> f64 {
    let prob = |k: u32| {
        if k < cap {
            p.powi(k as i32 - 1) * (1.0 - p)
        } else {
            p.powi(cap as i32 - 1)
        }
    };
    let second: f64 = (1..=cap).map(|k| (k * k) as f64 * prob(k)).sum();
    second - truncated_geometric_mean(p, cap).powi(2)
}

/// Per-problem mean attempts pooled over `seeds`, each run with `repeats`.
pub fn pooled_mean_attempts(p: f64, seeds: std::ops::Range<u64>, repeats: u32) -> Vec<(String, f64)> {
    let problems = fixtures();
    let policy = RetryPolicy::default();
    let mut sums = vec![0.0; problems.len()];
    let nseeds = seeds.end - seeds.start;
    for seed in seeds {
        let provider = ScriptedProvider::new(Script::Stochastic { fail_p: p, seed }).unwrap();
        let opts = EvalOptions {
            repeats,
            ..EvalOptions::default()
        };
        let run = evaluate(&problems, &provider, &policy, &opts).unwrap();
        for (i, prob) in problems.iter().enumerate() {
            let row = run.report.problems.iter().find(|r| r.id == prob.id).unwrap();
            assert_eq!(row.total_runs, repeats);
            sums[i] += row.mean_attempts;
        }
    }
    problems
        .iter()
        .zip(sums)
        .map(|(p, s)| (p.id.clone(), s / nseeds as f64))
        .collect()
}
