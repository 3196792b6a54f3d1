//! Exact arithmetic evaluation for `is/2` and the comparison builtins.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::EngineError;
use crate::term::{Bindings, Number, Term};
use crate::write::term_to_string;

fn int_of(n: &Number, op: &str) -> Result<BigInt, EngineError> {
    match n {
        Number::Int(i) => Ok(i.clone()),
        other => Err(EngineError::type_error(
            &format!("integer (in {op})"),
            other.clone().into_term_string(),
        )),
    }
}

impl Number {
    fn into_term_string(self) -> String {
        term_to_string(&self.into_term())
    }
}

/// Both numbers as exact rationals, or `None` when either is a float.
fn exact_pair(a: &Number, b: &Number) -> Option<(BigRational, BigRational)> {
    Some((a.to_rational()?, b.to_rational()?))
}

pub fn compare_numbers(a: &Number, b: &Number) -> Ordering {
    match exact_pair(a, b) {
        Some((x, y)) => x.cmp(&y),
        None => a.to_f64().partial_cmp(&b.to_f64()).unwrap_or(Ordering::Equal),
    }
}

fn float_result(x: f64) -> Result<Number, EngineError> {
    if x.is_finite() {
        Ok(Number::Float(x))
    } else {
        Err(EngineError::Domain(format!("non-finite float result {x}")))
    }
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn pow_exact(base: &BigRational, exp: &BigInt) -> Result<BigRational, EngineError> {
    let e = exp
        .abs()
        .to_u32()
        .ok_or_else(|| EngineError::Representation("exponent too large".into()))?;
    let p = num_traits::pow(base.clone(), e as usize);
    if exp.is_negative() {
        if p.is_zero() {
            return Err(EngineError::ZeroDivisor);
        }
        Ok(p.recip())
    } else {
        Ok(p)
    }
}

fn round_half_away(r: &BigRational) -> BigInt {
    r.round().to_integer()
}

/// Evaluates a ground arithmetic expression exactly.
pub fn eval_arith(expr: &Term, b: &Bindings) -> Result<Number, EngineError> {
    let t = b.deref(expr);
    match t {
        Term::Int(i) => Ok(Number::Int(i.clone())),
        Term::Rat(r) => Ok(Number::Rat(r.clone())),
        Term::Float(f) => Ok(Number::Float(*f)),
        Term::Var(_) => Err(EngineError::Instantiation("arithmetic expression".into())),
        Term::Atom(s) => match s.as_str() {
            "pi" => Ok(Number::Float(std::f64::consts::PI)),
            "e" => Ok(Number::Float(std::f64::consts::E)),
            "inf" | "infinite" => Ok(Number::Float(f64::INFINITY)),
            _ => Err(EngineError::type_error("evaluable", format!("{}/0", s))),
        },
        Term::Compound(f, args) => {
            let name = f.as_str();
            match args.len() {
                1 => {
                    let x = eval_arith(&args[0], b)?;
                    eval_unary(name, x)
                }
                2 => {
                    let x = eval_arith(&args[0], b)?;
                    let y = eval_arith(&args[1], b)?;
                    eval_binary(name, x, y)
                }
                n => Err(EngineError::type_error("evaluable", format!("{name}/{n}"))),
            }
        }
    }
}

fn eval_unary(name: &str, x: Number) -> Result<Number, EngineError> {
    Ok(match name {
        "-" => match x {
            Number::Int(i) => Number::Int(-i),
            Number::Rat(r) => Number::Rat(-r),
            Number::Float(f) => Number::Float(-f),
        },
        "+" => x,
        "abs" => match x {
            Number::Int(i) => Number::Int(i.abs()),
            Number::Rat(r) => Number::Rat(r.abs()),
            Number::Float(f) => Number::Float(f.abs()),
        },
        "sign" => match x {
            Number::Int(i) => Number::Int(i.signum()),
            Number::Rat(r) => Number::Int(r.signum().to_integer()),
            Number::Float(f) => Number::Float(f.signum()),
        },
        "sqrt" => {
            if let Some(r) = x.to_rational() {
                if r.is_negative() {
                    return Err(EngineError::Domain("sqrt of negative number".into()));
                }
                if let Some(s) = exact_sqrt(&r) {
                    return Ok(Number::from_rational(s));
                }
            }
            return float_result(x.to_f64().sqrt());
        }
        "float" => Number::Float(x.to_f64()),
        "integer" | "round" => match x.to_rational() {
            Some(r) => Number::Int(round_half_away(&r)),
            None => Number::Int(float_to_int(x.to_f64().round())?),
        },
        "truncate" => match x.to_rational() {
            Some(r) => Number::Int(r.trunc().to_integer()),
            None => Number::Int(float_to_int(x.to_f64().trunc())?),
        },
        "floor" => match x.to_rational() {
            Some(r) => Number::Int(r.floor().to_integer()),
            None => Number::Int(float_to_int(x.to_f64().floor())?),
        },
        "ceiling" => match x.to_rational() {
            Some(r) => Number::Int(r.ceil().to_integer()),
            None => Number::Int(float_to_int(x.to_f64().ceil())?),
        },
        "\\" => Number::Int(!int_of(&x, "\\")?),
        _ => return Err(EngineError::type_error("evaluable", format!("{name}/1"))),
    })
}

fn float_to_int(f: f64) -> Result<BigInt, EngineError> {
    num_traits::FromPrimitive::from_f64(f).ok_or_else(|| EngineError::Domain(format!("cannot convert {f} to integer")))
}

fn eval_binary(name: &str, x: Number, y: Number) -> Result<Number, EngineError> {
    match name {
        "+" | "-" | "*" => {
            if let Some((a, c)) = exact_pair(&x, &y) {
                let r = match name {
                    "+" => a + c,
                    "-" => a - c,
                    _ => a * c,
                };
                return Ok(Number::from_rational(r));
            }
            let (a, c) = (x.to_f64(), y.to_f64());
            float_result(match name {
                "+" => a + c,
                "-" => a - c,
                _ => a * c,
            })
        }
        "/" => {
            if y.is_zero() {
                return Err(EngineError::ZeroDivisor);
            }
            match exact_pair(&x, &y) {
                Some((a, c)) => Ok(Number::from_rational(a / c)),
                None => float_result(x.to_f64() / y.to_f64()),
            }
        }
        "//" | "div" | "mod" | "rem" => {
            let a = int_of(&x, name)?;
            let c = int_of(&y, name)?;
            if c.is_zero() {
                return Err(EngineError::ZeroDivisor);
            }
            Ok(Number::Int(match name {
                "//" | "div" => a.div_floor(&c),
                "mod" => a.mod_floor(&c),
                _ => a % c,
            }))
        }
        "min" | "max" => {
            let ord = compare_numbers(&x, &y);
            let pick_x = match name {
                "min" => ord != Ordering::Greater,
                _ => ord != Ordering::Less,
            };
            Ok(if pick_x { x } else { y })
        }
        "**" | "^" => {
            if let (Some(base), Number::Int(e)) = (x.to_rational(), &y) {
                if name == "^" && e.is_negative() && !base.abs().is_one() && base.is_integer() {
                    return Err(EngineError::type_error("nonnegative exponent", e));
                }
                return Ok(Number::from_rational(pow_exact(&base, e)?));
            }
            float_result(x.to_f64().powf(y.to_f64()))
        }
        "rdiv" => {
            let (a, c) = exact_pair(&x, &y).ok_or_else(|| EngineError::type_error("rational", "float"))?;
            if c.is_zero() {
                return Err(EngineError::ZeroDivisor);
            }
            Ok(Number::from_rational(a / c))
        }
        "/\\" => Ok(Number::Int(int_of(&x, name)? & int_of(&y, name)?)),
        "\\/" => Ok(Number::Int(int_of(&x, name)? | int_of(&y, name)?)),
        "xor" => Ok(Number::Int(int_of(&x, name)? ^ int_of(&y, name)?)),
        "gcd" => Ok(Number::Int(int_of(&x, name)?.gcd(&int_of(&y, name)?))),
        _ => Err(EngineError::type_error("evaluable", format!("{name}/2"))),
    }
}
