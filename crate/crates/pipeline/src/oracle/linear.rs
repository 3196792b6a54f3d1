//! Exact Gauss-Jordan elimination for systems of linear equations given as
//! text, e.g. `a + 3 = 2 * (b - 3)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::expr::{self, BinOp, Expr};
use super::OracleError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearInstance {
    pub equations: Vec<String>,
    /// Linear expression over the variables, evaluated on the solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
}

/// `sum(coeffs[v] * v) + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
struct Affine {
    coeffs: BTreeMap<String, BigRational>,
    constant: BigRational,
}

impl Affine {
    fn constant(c: BigRational) -> Affine {
        Affine {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    fn as_constant(&self) -> Option<&BigRational> {
        self.coeffs.is_empty().then_some(&self.constant)
    }

    fn scale(mut self, k: &BigRational) -> Affine {
        for c in self.coeffs.values_mut() {
            *c = &*c * k;
        }
        self.constant = &self.constant * k;
        self.coeffs.retain(|_, c| !c.is_zero());
        self
    }

    fn add(mut self, other: Affine, sign: i32) -> Affine {
        let s = BigRational::from_integer(sign.into());
        for (v, c) in other.coeffs {
            let e = self.coeffs.entry(v).or_insert_with(BigRational::zero);
            *e = &*e + c * &s;
        }
        self.constant = &self.constant + other.constant * &s;
        self.coeffs.retain(|_, c| !c.is_zero());
        self
    }
}

fn affine(e: &Expr, src: &str) -> Result<Affine, OracleError> {
    let nonlinear = || OracleError::NonLinear(src.to_owned());
    Ok(match e {
        Expr::Num(n) => Affine::constant(n.clone()),
        Expr::Var(v) => {
            let mut a = Affine::default();
            a.coeffs.insert(v.clone(), BigRational::one());
            a
        }
        Expr::Neg(x) => affine(x, src)?.scale(&-BigRational::one()),
        Expr::Bin(BinOp::Add, x, y) => affine(x, src)?.add(affine(y, src)?, 1),
        Expr::Bin(BinOp::Sub, x, y) => affine(x, src)?.add(affine(y, src)?, -1),
        Expr::Bin(BinOp::Mul, x, y) => {
            let (a, b) = (affine(x, src)?, affine(y, src)?);
            match (a.as_constant(), b.as_constant()) {
                (Some(k), _) => b.clone().scale(k),
                (_, Some(k)) => a.clone().scale(k),
                _ => return Err(nonlinear()),
            }
        }
        Expr::Bin(BinOp::Div, x, y) => {
            let k = affine(y, src)?.as_constant().cloned().ok_or_else(nonlinear)?;
            if k.is_zero() {
                return Err(OracleError::InvalidInstance(format!("division by zero in `{src}`")));
            }
            affine(x, src)?.scale(&k.recip())
        }
        _ => return Err(OracleError::Parse(format!("not a linear expression: `{src}`"))),
    })
}

/// Parses `lhs = rhs` into a row `coeffs . x = rhs_constant`.
fn equation(src: &str) -> Result<Affine, OracleError> {
    match expr::parse(src)? {
        Expr::Bin(BinOp::Eq, l, r) => Ok(affine(&l, src)?.add(affine(&r, src)?, -1)),
        _ => Err(OracleError::Parse(format!("expected an equation: `{src}`"))),
    }
}

/// Solves the system exactly. Variables are returned in order of first
/// appearance. Any inconsistent row reports `Inconsistent`; otherwise a
/// rank below the number of variables reports `Singular`.
pub fn linear_gold(equations: &[String]) -> Result<Vec<(String, BigRational)>, OracleError> {
    let rows: Vec<Affine> = equations.iter().map(|e| equation(e)).collect::<Result<_, _>>()?;
    let mut names: Vec<String> = Vec::new();
    for src in equations {
        expr::parse(src)?.vars(&mut names);
    }
    let n = names.len();
    // augmented matrix [A | b] with A x = b, b = -constant
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            let mut row: Vec<BigRational> = names
                .iter()
                .map(|v| r.coeffs.get(v).cloned().unwrap_or_else(BigRational::zero))
                .collect();
            row.push(-r.constant.clone());
            row
        })
        .collect();
    let mut rank = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..n {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot).skip(col) {
                    *x = &*x - p * &f;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if m[rank..].iter().any(|row| !row[n].is_zero()) {
        return Err(OracleError::Inconsistent);
    }
    if rank < n {
        return Err(OracleError::Singular);
    }
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, m[i][n].clone()))
        .collect())
}

/// Solves the instance and evaluates its answer expression.
pub fn linear_answer(inst: &LinearInstance) -> Result<BigRational, OracleError> {
    let sol = linear_gold(&inst.equations)?;
    let src = inst
        .answer
        .as_deref()
        .ok_or_else(|| OracleError::InvalidInstance("instance has no answer expression".into()))?;
    let a = affine(&expr::parse(src)?, src)?;
    let mut total = a.constant.clone();
    for (v, c) in &a.coeffs {
        let value = sol
            .iter()
            .find(|(n, _)| n == v)
            .map(|(_, x)| x)
            .ok_or_else(|| OracleError::InvalidInstance(format!("answer uses unknown variable `{v}`")))?;
        total += c * value;
    }
    Ok(total)
}

/// `N` for integers, `N/D` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        let sign = if r.is_negative() { "-" } else { "" };
        format!("{sign}{}/{}", r.numer().abs(), r.denom())
    }
}
