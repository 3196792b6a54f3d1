//! Greedy seat filling with an orthogonal-neighbor distancing rule.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillOrder {
    /// Left to right within a row, rows top to bottom.
    RowMajor,
    /// Top to bottom within a column, columns left to right.
    ColumnMajor,
}

impl FromStr for FillOrder {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, OracleError> {
        match s {
            "row_major" | "row-major" => Ok(FillOrder::RowMajor),
            "column_major" | "column-major" => Ok(FillOrder::ColumnMajor),
            _ => Err(OracleError::InvalidInstance(format!("unknown fill order `{s}`"))),
        }
    }
}

/// Seats everyone it can, visiting seats in `order`. A seat is taken when
/// it is free and no seat sharing an edge with it is occupied. Coordinates
/// are 1-based `(row, col)`. Returns the total including `pre_seated`.
pub fn cinema(rows: usize, cols: usize, pre_seated: &[(usize, usize)], order: FillOrder) -> Result<usize, OracleError> {
    if rows == 0 || cols == 0 {
        return Err(OracleError::InvalidInstance("grid dimensions must be positive".into()));
    }
    let mut taken = vec![vec![false; cols]; rows];
    for &(r, c) in pre_seated {
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(OracleError::InvalidInstance(format!(
                "seat ({r},{c}) outside {rows}x{cols}"
            )));
        }
        taken[r - 1][c - 1] = true;
    }
    let seats: Vec<(usize, usize)> = match order {
        FillOrder::RowMajor => (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect(),
        FillOrder::ColumnMajor => (0..cols).flat_map(|c| (0..rows).map(move |r| (r, c))).collect(),
    };
    for (r, c) in seats {
        if taken[r][c] {
            continue;
        }
        let occupied = |dr: isize, dc: isize| {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols && taken[nr as usize][nc as usize]
        };
        if !(occupied(-1, 0) || occupied(1, 0) || occupied(0, -1) || occupied(0, 1)) {
            taken[r][c] = true;
        }
    }
    Ok(taken.iter().flatten().filter(|t| **t).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(cinema(3, 4, &[(1, 2)], FillOrder::RowMajor), Ok(6));
        assert_eq!(cinema(1, 1, &[], FillOrder::RowMajor), Ok(1));
        assert_eq!(cinema(1, 3, &[], FillOrder::RowMajor), Ok(2));
        assert_eq!(cinema(3, 3, &[], FillOrder::ColumnMajor), Ok(5));
        assert!(cinema(0, 3, &[], FillOrder::RowMajor).is_err());
        assert!(cinema(2, 2, &[(3, 1)], FillOrder::RowMajor).is_err());
    }
}
