//! Numeric answers and gold values.

use std::fmt;

use deduce_core::Number;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Answer produced by a candidate program.
///
/// Serialized as a plain JSON number: integers that fit `i64` stay integral,
/// everything else becomes the nearest `f64`. The exact value is kept in
/// memory for comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Answer(pub Number);

impl Answer {
    pub fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn as_i64(&self) -> Option<i64> {
        match &self.0 {
            Number::Int(i) => i.to_i64(),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self.as_i64() {
            Some(i) => serde_json::Value::from(i),
            None => serde_json::Number::from_f64(self.to_f64())
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Number::Int(i) => write!(f, "{i}"),
            Number::Rat(r) => write!(f, "{} (exact {}/{})", self.to_f64(), r.numer(), r.denom()),
            Number::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Answer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_i64() {
            Some(i) => s.serialize_i64(i),
            None => s.serialize_f64(self.to_f64()),
        }
    }
}

impl<'de> Deserialize<'de> for Answer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        Ok(match n.as_i64() {
            Some(i) => Answer(Number::Int(BigInt::from(i))),
            None => Answer(Number::Float(n.as_f64().unwrap_or(f64::NAN))),
        })
    }
}

/// Reference answer of a problem: a single integer or float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gold {
    Int(i64),
    Float(f64),
}

/// Relative tolerance for float golds.
pub const FLOAT_TOLERANCE: f64 = 1e-6;

impl Gold {
    /// Integer golds need an exactly equal value; float golds accept
    /// `|a - g| <= 1e-6 * max(1, |g|)`.
    pub fn matches(&self, answer: &Answer) -> bool {
        match *self {
            Gold::Int(g) => match &answer.0 {
                Number::Int(i) => *i == BigInt::from(g),
                Number::Rat(_) => false,
                Number::Float(x) => *x == g as f64,
            },
            Gold::Float(g) => {
                let a = answer.to_f64();
                (a - g).abs() <= FLOAT_TOLERANCE * g.abs().max(1.0)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Gold::Int(i) => i as f64,
            Gold::Float(x) => x,
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Gold> {
        let n = v.as_number()?;
        match n.as_i64() {
            Some(i) => Some(Gold::Int(i)),
            None => n.as_f64().filter(|x| x.is_finite()).map(Gold::Float),
        }
    }
}

impl fmt::Display for Gold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gold::Int(i) => write!(f, "{i}"),
            Gold::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Gold {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Gold::Int(i) => s.serialize_i64(i),
            Gold::Float(x) => s.serialize_f64(x),
        }
    }
}

impl<'de> Deserialize<'de> for Gold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Gold::from_json(&v).ok_or_else(|| serde::de::Error::custom("expected a number"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn gold_matching() {
        let int = |i: i64| Answer(Number::Int(BigInt::from(i)));
        assert!(Gold::Int(9821).matches(&int(9821)));
        assert!(!Gold::Int(9821).matches(&int(9820)));
        let third = Answer(Number::Rat(BigRational::new(1.into(), 3.into())));
        assert!(!Gold::Int(0).matches(&third));
        assert!(Gold::Float(0.333333333).matches(&third));
        assert!(!Gold::Float(0.3333).matches(&third));
        assert!(Gold::Float(5.0).matches(&int(5)));
    }

    #[test]
    fn json_forms() {
        let a = Answer(Number::Int(BigInt::from(18)));
        assert_eq!(serde_json::to_string(&a).unwrap(), "18");
        let b = Answer(Number::Float(2.5));
        assert_eq!(serde_json::to_string(&b).unwrap(), "2.5");
        assert_eq!(serde_json::from_str::<Gold>("7").unwrap(), Gold::Int(7));
        assert_eq!(serde_json::from_str::<Gold>("7.5").unwrap(), Gold::Float(7.5));
        assert!(serde_json::from_str::<Gold>("\"7\"").is_err());
    }
}
