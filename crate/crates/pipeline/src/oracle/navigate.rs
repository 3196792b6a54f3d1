//! Navigation instructions, the distance oracle and the problem generator.
//!
//! The walker starts at the origin with heading 0. Headings are 0=N, 1=E,
//! 2=S, 3=W; north is +y and east is +x. Sideways and backward steps are
//! taken relative to the current heading and never change it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OracleError;
use crate::answer::Gold;
use crate::problem::{Category, ProblemRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepDir {
    /// "Take N steps." without a direction word.
    Plain,
    Forward,
    Backward,
    Left,
    Right,
}

impl StepDir {
    /// Heading offset added to the current heading.
    fn offset(self) -> i64 {
        match self {
            StepDir::Plain | StepDir::Forward => 0,
            StepDir::Right => 1,
            StepDir::Backward => 2,
            StepDir::Left => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    Left,
    Right,
    Around,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    Step(StepDir, u32),
    Turn(Turn),
    /// Keeps the current heading; present so sideways steps read naturally.
    AlwaysFaceForward,
}

/// The nine templates, in generator order. `N` stands for the step count.
pub const TEMPLATES: [&str; 9] = [
    "Take N steps.",
    "Take N steps forward.",
    "Take N steps backward.",
    "Take N steps left.",
    "Take N steps right.",
    "Turn left.",
    "Turn right.",
    "Turn around.",
    "Always face forward.",
];

impl Instruction {
    fn from_template(t: usize, n: u32) -> Instruction {
        match t {
            0 => Instruction::Step(StepDir::Plain, n),
            1 => Instruction::Step(StepDir::Forward, n),
            2 => Instruction::Step(StepDir::Backward, n),
            3 => Instruction::Step(StepDir::Left, n),
            4 => Instruction::Step(StepDir::Right, n),
            5 => Instruction::Turn(Turn::Left),
            6 => Instruction::Turn(Turn::Right),
            7 => Instruction::Turn(Turn::Around),
            _ => Instruction::AlwaysFaceForward,
        }
    }

    /// Prolog term used by generated reference programs.
    pub fn to_prolog(&self) -> String {
        match self {
            Instruction::Step(d, n) => {
                let dir = match d {
                    StepDir::Plain | StepDir::Forward => "forward",
                    StepDir::Backward => "backward",
                    StepDir::Left => "left",
                    StepDir::Right => "right",
                };
                format!("take({n}, {dir})")
            }
            Instruction::Turn(Turn::Left) => "turn(left)".into(),
            Instruction::Turn(Turn::Right) => "turn(right)".into(),
            Instruction::Turn(Turn::Around) => "turn(around)".into(),
            Instruction::AlwaysFaceForward => "face_forward".into(),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Step(d, n) => {
                let noun = if *n == 1 { "step" } else { "steps" };
                let dir = match d {
                    StepDir::Plain => "",
                    StepDir::Forward => " forward",
                    StepDir::Backward => " backward",
                    StepDir::Left => " left",
                    StepDir::Right => " right",
                };
                write!(f, "Take {n} {noun}{dir}.")
            }
            Instruction::Turn(Turn::Left) => f.write_str("Turn left."),
            Instruction::Turn(Turn::Right) => f.write_str("Turn right."),
            Instruction::Turn(Turn::Around) => f.write_str("Turn around."),
            Instruction::AlwaysFaceForward => f.write_str("Always face forward."),
        }
    }
}

impl FromStr for Instruction {
    type Err = OracleError;

    /// Accepts one sentence, case-insensitive, trailing period optional.
    fn from_str(s: &str) -> Result<Instruction, OracleError> {
        let unknown = || OracleError::UnknownInstruction(s.trim().to_owned());
        let lower = s.trim().trim_end_matches('.').to_ascii_lowercase();
        let words: Vec<&str> = lower.split_whitespace().collect();
        match words.as_slice() {
            ["turn", "left"] => Ok(Instruction::Turn(Turn::Left)),
            ["turn", "right"] => Ok(Instruction::Turn(Turn::Right)),
            ["turn", "around"] => Ok(Instruction::Turn(Turn::Around)),
            ["always", "face", "forward"] => Ok(Instruction::AlwaysFaceForward),
            ["take", n, "step" | "steps", rest @ ..] => {
                let n: u32 = n.parse().map_err(|_| unknown())?;
                let dir = match rest {
                    [] => StepDir::Plain,
                    ["forward"] => StepDir::Forward,
                    ["backward"] => StepDir::Backward,
                    ["left"] => StepDir::Left,
                    ["right"] => StepDir::Right,
                    _ => return Err(unknown()),
                };
                Ok(Instruction::Step(dir, n))
            }
            _ => Err(unknown()),
        }
    }
}

/// Splits text into sentences and parses each one.
pub fn parse_instructions(text: &str) -> Result<Vec<Instruction>, OracleError> {
    text.split('.')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NavState {
    pub x: i64,
    pub y: i64,
    /// Always in 0..4.
    pub heading: i64,
}

impl NavState {
    pub fn apply(&mut self, ins: &Instruction) {
        match *ins {
            Instruction::Turn(Turn::Left) => self.heading = (self.heading + 3) % 4,
            Instruction::Turn(Turn::Right) => self.heading = (self.heading + 1) % 4,
            Instruction::Turn(Turn::Around) => self.heading = (self.heading + 2) % 4,
            Instruction::AlwaysFaceForward => {}
            Instruction::Step(d, n) => {
                let n = n as i64;
                match (self.heading + d.offset()) % 4 {
                    0 => self.y += n,
                    1 => self.x += n,
                    2 => self.y -= n,
                    _ => self.x -= n,
                }
            }
        }
    }
}

/// Euclidean distance from the origin after following `instructions`:
/// an integer when the squared distance is a perfect square, else the
/// `f64` square root.
pub fn navigate_oracle(instructions: &[Instruction]) -> Gold {
    let mut st = NavState::default();
    instructions.iter().for_each(|i| st.apply(i));
    distance_of(st.x, st.y)
}

pub fn distance_of(x: i64, y: i64) -> Gold {
    let d2 = x * x + y * y;
    let r = (d2 as f64).sqrt().round() as i64;
    if r * r == d2 {
        Gold::Int(r)
    } else {
        Gold::Float((d2 as f64).sqrt())
    }
}

/// The sequence followed by a turn around and the mirrored walk back,
/// which always ends at the origin.
pub fn mirrored(instructions: &[Instruction]) -> Vec<Instruction> {
    let mut out = instructions.to_vec();
    out.push(Instruction::Turn(Turn::Around));
    out.extend(instructions.iter().rev().map(|i| match i {
        Instruction::Turn(Turn::Left) => Instruction::Turn(Turn::Right),
        Instruction::Turn(Turn::Right) => Instruction::Turn(Turn::Left),
        other => *other,
    }));
    out
}

const PREAMBLE: &str = "You start at the origin facing north. Follow the instructions and \
report the straight-line distance between where you end up and the starting point.";

const WALKER: &str = "\
problem(Distance) :-
    instructions(Is),
    walk(Is, 0, 0, 0, X, Y),
    Distance is sqrt(X * X + Y * Y).

% walk(Instructions, X0, Y0, Heading0, X, Y); heading 0 = north, 1 = east.
walk([], X, Y, _, X, Y).
walk([I|Is], X0, Y0, H0, X, Y) :-
    step(I, X0, Y0, H0, X1, Y1, H1),
    walk(Is, X1, Y1, H1, X, Y).

step(turn(left), X, Y, H0, X, Y, H) :- H is (H0 + 3) mod 4.
step(turn(right), X, Y, H0, X, Y, H) :- H is (H0 + 1) mod 4.
step(turn(around), X, Y, H0, X, Y, H) :- H is (H0 + 2) mod 4.
step(face_forward, X, Y, H, X, Y, H).
step(take(N, Dir), X0, Y0, H, X, Y, H) :-
    offset(Dir, Off),
    D is (H + Off) mod 4,
    delta(D, DX, DY),
    X is X0 + N * DX,
    Y is Y0 + N * DY.

offset(forward, 0).
offset(right, 1).
offset(backward, 2).
offset(left, 3).

delta(0, 0, 1).
delta(1, 1, 0).
delta(2, 0, -1).
delta(3, -1, 0).
";

/// Reference program computing the distance for `instructions`.
pub fn reference_program(instructions: &[Instruction]) -> String {
    let terms: Vec<String> = instructions.iter().map(Instruction::to_prolog).collect();
    format!("{WALKER}\ninstructions([{}]).\n", terms.join(", "))
}

pub fn statement(instructions: &[Instruction]) -> String {
    let sentences: Vec<String> = instructions.iter().map(|i| i.to_string()).collect();
    format!("{PREAMBLE} {}", sentences.join(" "))
}

/// Instruction list of a generated problem, recovered from its statement.
pub fn instructions_of(statement: &str) -> Result<Vec<Instruction>, OracleError> {
    parse_instructions(statement.strip_prefix(PREAMBLE).unwrap_or(statement))
}

/// Samples one instruction list: 2 to 8 instructions, each drawn uniformly
/// from the nine templates, step counts uniform in 1..=10.
pub fn sample_instructions(rng: &mut impl Rng) -> Vec<Instruction> {
    let len = rng.random_range(2..=8);
    (0..len)
        .map(|_| {
            let t = rng.random_range(0..TEMPLATES.len());
            let n = rng.random_range(1..=10);
            Instruction::from_template(t, n)
        })
        .collect()
}

/// `n` navigate problems, deterministic in `seed`.
pub fn gen_navigate(seed: u64, n: usize) -> Result<Vec<ProblemRecord>, OracleError> {
    if n == 0 {
        return Err(OracleError::InvalidInstance("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|i| {
            let ins = sample_instructions(&mut rng);
            ProblemRecord {
                id: format!("navigate-s{seed}-{i:04}"),
                category: Category::Navigate,
                statement: statement(&ins),
                gold: navigate_oracle(&ins),
                entanglement: None,
                entry: None,
                reference_program: Some(reference_program(&ins)),
            }
        })
        .collect())
}
