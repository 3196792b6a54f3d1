//! Few-shot prompt assembly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::problem::Category;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("configuration error: a prompt needs at least one exemplar")]
    NoShots,
}

/// One exemplar: a problem statement and a commented program solving it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub problem: String,
    pub program: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub name: String,
    pub preamble: String,
    pub cue: String,
}

const CONVENTION: &str = "Define a predicate problem/1 whose single argument is the numeric answer. \
Use clpfd constraints (#=, #<, ins, label) for integer puzzles and {...} blocks for linear equations. \
Comment each step of the reasoning. Put the whole program in one ```prolog fenced block.";

impl PromptTemplate {
    pub fn for_category(category: Category) -> PromptTemplate {
        let (name, task) = match category {
            Category::MathWord => ("math-word", "Translate the math word problem into a Prolog program."),
            Category::ConstraintSatisfaction => (
                "constraint-satisfaction",
                "Encode every constraint of the puzzle, including implicit ones such as digit ranges, as a Prolog program.",
            ),
            Category::AlgorithmicInstructions => (
                "algorithmic-instructions",
                "Simulate the described procedure step by step in a Prolog program.",
            ),
            Category::Navigate => (
                "navigate",
                "Track the position and heading (0 north, 1 east, 2 south, 3 west) in a Prolog program and compute the final distance from the start.",
            ),
            Category::External => ("generic", "Solve the problem with a Prolog program."),
        };
        PromptTemplate {
            name: name.to_owned(),
            preamble: format!("{task} {CONVENTION}"),
            cue: "Solution:".to_owned(),
        }
    }
}

/// Preamble, then each shot in order, then the target problem and the cue.
pub fn assemble_prompt(problem: &str, shots: &[Shot], template: &PromptTemplate) -> Result<String, PromptError> {
    if shots.is_empty() {
        return Err(PromptError::NoShots);
    }
    let mut out = String::new();
    out.push_str(template.preamble.trim_end());
    out.push_str("\n\n");
    for shot in shots {
        out.push_str("Problem: ");
        out.push_str(shot.problem.trim());
        out.push('\n');
        out.push_str(&template.cue);
        out.push_str("\n```prolog\n");
        out.push_str(shot.program.trim_end());
        out.push_str("\n```\n\n");
    }
    out.push_str("Problem: ");
    out.push_str(problem.trim());
    out.push('\n');
    out.push_str(&template.cue);
    out.push('\n');
    Ok(out)
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn shot(problem: &str, program: &str) -> Shot {
    Shot {
        problem: problem.to_owned(),
        program: program.to_owned(),
    }
}

/// Built-in exemplars. None of them is a fixture problem.
pub fn default_shots(category: Category) -> Vec<Shot> {
    match category {
        Category::MathWord | Category::External => vec![
            shot(
                "A farmer has chickens and cows, 30 heads and 74 legs in total. How many cows are there?",
                "% C chickens and W cows\nproblem(W) :-\n    % every animal has one head\n    { C + W = 30,\n    % chickens have 2 legs, cows 4\n      2 * C + 4 * W = 74 }.",
            ),
            shot(
                "Tom is 4 years older than twice Ann's age. In 3 years their ages will sum to 40. How old is Ann?",
                "problem(Ann) :-\n    % Tom's current age\n    { Tom = 2 * Ann + 4,\n    % both grow 3 years older\n      (Tom + 3) + (Ann + 3) = 40 }.",
            ),
        ],
        Category::ConstraintSatisfaction => vec![
            shot(
                "I am a two digit odd number. My digits sum to 11 and my tens digit is larger than my ones digit by 5. What number am I?",
                "problem(N) :-\n    % tens digit T is nonzero, ones digit O\n    T in 1..9, O in 0..9,\n    N #= 10 * T + O,\n    O mod 2 #= 1,\n    T + O #= 11,\n    T #= O + 5.",
            ),
            shot(
                "Ann, Ben and Cal stand in a row of 3. Ben is not at either end and Ann is right of Cal. What is Ann's position counting from the left?",
                "problem(Ann) :-\n    [Ann, Ben, Cal] ins 1..3,\n    all_different([Ann, Ben, Cal]),\n    % Ben is in the middle\n    Ben #= 2,\n    Ann #> Cal.",
            ),
        ],
        Category::AlgorithmicInstructions => vec![shot(
            "Start with the list 3, 1, 2. Each round remove the first number and append it twice to the end. After 2 rounds, what is the sum of the list?",
            "problem(Sum) :-\n    rounds(2, [3, 1, 2], Final),\n    sum_list(Final, Sum).\n\n% one round moves the head to the end, duplicated\nrounds(0, L, L).\nrounds(K, [H|T], Final) :-\n    K > 0,\n    append(T, [H, H], Next),\n    K1 is K - 1,\n    rounds(K1, Next, Final).",
        )],
        Category::Navigate => vec![
            shot(
                "You start at the origin facing north. Take 3 steps. Turn right. Take 4 steps.",
                "problem(D) :-\n    % 3 north then 4 east\n    X is 4, Y is 3,\n    D is sqrt(X * X + Y * Y).",
            ),
            shot(
                "You start at the origin facing north. Always face forward. Take 2 steps left. Take 2 steps backward.",
                "problem(D) :-\n    % heading never changes: 2 west, 2 south\n    X is -2, Y is -2,\n    D is sqrt(X * X + Y * Y).",
            ),
        ],
    }
}
