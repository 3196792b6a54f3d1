//! Round-by-round simulator for the sum-it-up game.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRule {
    /// Each waitlist number goes into the first 0 square.
    Plain,
    /// The number is discarded when the square left of the first 0 equals it.
    PrevEqualClears,
    /// When the number equals the sum of the neighbors of the first 0
    /// square, the square and its neighbors become 0. A neighbor missing at
    /// the edge counts as 0 and is not written.
    NeighborSumZeroes,
}

impl FromStr for SumRule {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, OracleError> {
        match s {
            "plain" => Ok(SumRule::Plain),
            "prev_equal_clears" => Ok(SumRule::PrevEqualClears),
            "neighbor_sum_zeroes" => Ok(SumRule::NeighborSumZeroes),
            _ => Err(OracleError::InvalidInstance(format!("unknown rule `{s}`"))),
        }
    }
}

impl fmt::Display for SumRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SumRule::Plain => "plain",
            SumRule::PrevEqualClears => "prev_equal_clears",
            SumRule::NeighborSumZeroes => "neighbor_sum_zeroes",
        })
    }
}

pub const SQUARES: usize = 10;

/// Plays every round and returns the final sum of the squares.
pub fn sum_it_up(squares: &[i64], waitlist: &[i64], rule: SumRule) -> Result<i64, OracleError> {
    if squares.len() != SQUARES {
        return Err(OracleError::InvalidInstance(format!(
            "expected {SQUARES} squares, got {}",
            squares.len()
        )));
    }
    let mut s = squares.to_vec();
    for (round, &w) in waitlist.iter().enumerate() {
        let i = s.iter().position(|&x| x == 0).ok_or_else(|| {
            log::warn!("sum-it-up: no 0 square in round {round}");
            OracleError::NoZeroSquare { round }
        })?;
        let before = if i > 0 { s[i - 1] } else { 0 };
        let after = s.get(i + 1).copied().unwrap_or(0);
        match rule {
            SumRule::Plain => s[i] = w,
            SumRule::PrevEqualClears => {
                if !(i > 0 && before == w) {
                    s[i] = w;
                }
            }
            SumRule::NeighborSumZeroes => {
                if w == before + after {
                    let lo = i.saturating_sub(1);
                    let hi = (i + 1).min(s.len() - 1);
                    s[lo..=hi].iter_mut().for_each(|x| *x = 0);
                } else {
                    s[i] = w;
                }
            }
        }
    }
    Ok(s.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    const START: [i64; 10] = [1, -2, 3, 0, 4, 0, -1, -1, 0, 0];

    #[test]
    fn table_rows() {
        assert_eq!(sum_it_up(&START, &[7, 3, -4, -2], SumRule::Plain), Ok(8));
        assert_eq!(sum_it_up(&START, &[3, -2, 4, -1], SumRule::PrevEqualClears), Ok(1));
        assert_eq!(
            sum_it_up(&START, &[7, 3, -4, -4, 3], SumRule::NeighborSumZeroes),
            Ok(-3)
        );
        assert_eq!(sum_it_up(&START, &[], SumRule::Plain), Ok(4));
    }

    #[test]
    fn errors_and_edges() {
        let full = [1; 10];
        assert_eq!(
            sum_it_up(&full, &[2], SumRule::Plain),
            Err(OracleError::NoZeroSquare { round: 0 })
        );
        assert!(sum_it_up(&[0; 3], &[], SumRule::Plain).is_err());
        // first square is 0: no left neighbor, right neighbor 5
        let edge = [0, 5, 1, 1, 1, 1, 1, 1, 1, 1];
        assert_eq!(sum_it_up(&edge, &[5], SumRule::NeighborSumZeroes), Ok(8));
        assert_eq!(sum_it_up(&edge, &[5], SumRule::PrevEqualClears), Ok(18));
        assert!("diagonal".parse::<SumRule>().is_err());
    }
}
