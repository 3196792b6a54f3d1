//! Exhaustive enumeration over small integer domains.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::expr::{self, BinOp, Expr};
use super::OracleError;

/// Largest search space `csp_brute` accepts.
pub const MAX_ASSIGNMENTS: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspVar {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

/// Instance file: variables with inclusive ranges, constraint strings and
/// an optional answer expression evaluated on each solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspInstance {
    pub vars: Vec<CspVar>,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
}

struct Compiled {
    constraints: Vec<Expr>,
    answer: Option<Expr>,
}

fn compile(inst: &CspInstance) -> Result<Compiled, OracleError> {
    let names: Vec<&str> = inst.vars.iter().map(|v| v.name.as_str()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(OracleError::InvalidInstance(format!("variable `{n}` declared twice")));
        }
    }
    let check = |e: &Expr| -> Result<(), OracleError> {
        let mut vs = Vec::new();
        e.vars(&mut vs);
        match vs.iter().find(|v| !names.contains(&v.as_str())) {
            Some(v) => Err(OracleError::InvalidInstance(format!("undeclared variable `{v}`"))),
            None => Ok(()),
        }
    };
    let constraints = inst
        .constraints
        .iter()
        .map(|c| expr::parse(c))
        .collect::<Result<Vec<_>, _>>()?;
    constraints.iter().try_for_each(check)?;
    let answer = inst.answer.as_deref().map(expr::parse).transpose()?;
    if let Some(a) = &answer {
        check(a)?;
    }
    Ok(Compiled { constraints, answer })
}

/// Integer evaluation. `None` means the expression is undefined for this
/// assignment (division by zero, inexact division, overflow).
fn eval(e: &Expr, names: &[CspVar], vals: &[i64]) -> Option<i128> {
    Some(match e {
        Expr::Num(r) => {
            if !r.is_integer() {
                return None;
            }
            r.to_integer().to_i128()?
        }
        Expr::Var(v) => vals[names.iter().position(|n| &n.name == v)?] as i128,
        Expr::Neg(a) => -eval(a, names, vals)?,
        Expr::Not(a) => (eval(a, names, vals)? == 0) as i128,
        Expr::Call(f, args) => {
            let x = eval(&args[0], names, vals)?;
            match f.as_str() {
                "abs" => x.abs(),
                "min" => x.min(eval(&args[1], names, vals)?),
                _ => x.max(eval(&args[1], names, vals)?),
            }
        }
        Expr::Bin(op, a, b) => {
            let x = eval(a, names, vals)?;
            if *op == BinOp::And && x == 0 {
                return Some(0);
            }
            if *op == BinOp::Or && x != 0 {
                return Some(1);
            }
            let y = eval(b, names, vals)?;
            match op {
                BinOp::Add => x.checked_add(y)?,
                BinOp::Sub => x.checked_sub(y)?,
                BinOp::Mul => x.checked_mul(y)?,
                BinOp::Div => {
                    if y == 0 || x % y != 0 {
                        return None;
                    }
                    x / y
                }
                BinOp::Mod => {
                    if y == 0 {
                        return None;
                    }
                    x.mod_floor(&y)
                }
                BinOp::Eq => (x == y) as i128,
                BinOp::Ne => (x != y) as i128,
                BinOp::Lt => (x < y) as i128,
                BinOp::Le => (x <= y) as i128,
                BinOp::Gt => (x > y) as i128,
                BinOp::Ge => (x >= y) as i128,
                BinOp::And | BinOp::Or => (y != 0) as i128,
            }
        }
    })
}

/// Size of the full assignment space.
pub fn search_space(inst: &CspInstance) -> u128 {
    inst.vars
        .iter()
        .map(|v| {
            if v.hi < v.lo {
                0
            } else {
                (v.hi as i128 - v.lo as i128 + 1) as u128
            }
        })
        .fold(1u128, |acc, n| acc.saturating_mul(n))
}

/// Every assignment satisfying all constraints, in lexicographic order of
/// the declared variables (first variable varies slowest). Modulo follows
/// the sign of the divisor; `/` must divide exactly.
pub fn csp_brute(inst: &CspInstance) -> Result<Vec<Vec<i64>>, OracleError> {
    let size = search_space(inst);
    if size > MAX_ASSIGNMENTS {
        return Err(OracleError::SearchSpaceTooLarge {
            size,
            limit: MAX_ASSIGNMENTS,
        });
    }
    let compiled = compile(inst)?;
    let mut out = Vec::new();
    if size == 0 {
        return Ok(out);
    }
    let n = inst.vars.len();
    let mut vals: Vec<i64> = inst.vars.iter().map(|v| v.lo).collect();
    loop {
        if compiled
            .constraints
            .iter()
            .all(|c| eval(c, &inst.vars, &vals).is_some_and(|v| v != 0))
        {
            out.push(vals.clone());
        }
        // odometer increment, last variable fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if vals[i] < inst.vars[i].hi {
                vals[i] += 1;
                break;
            }
            vals[i] = inst.vars[i].lo;
        }
    }
}

/// Distinct values of the answer expression over all solutions, ascending.
pub fn csp_answers(inst: &CspInstance) -> Result<Vec<i128>, OracleError> {
    let compiled = compile(inst)?;
    let answer = compiled
        .answer
        .ok_or_else(|| OracleError::InvalidInstance("instance has no answer expression".into()))?;
    let mut vals: Vec<i128> = csp_brute(inst)?
        .iter()
        .map(|s| eval(&answer, &inst.vars, s).ok_or_else(|| OracleError::InvalidInstance("answer undefined".into())))
        .collect::<Result<_, _>>()?;
    vals.sort_unstable();
    vals.dedup();
    Ok(vals)
}
