use std::fmt;

/// Largest magnitude a finite domain bound may take. Keeps products of
/// coefficients and bounds inside `i128`.
pub const FD_LIMIT: i64 = 1 << 62;

/// Sentinels for unbounded ends.
pub const INF: i64 = i64::MIN;
pub const SUP: i64 = i64::MAX;

/// Integer domain as a sorted list of disjoint, non-adjacent closed
/// intervals. `INF`/`SUP` mark unbounded ends. The empty list is the
/// failure signal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FdDomain {
    intervals: Vec<(i64, i64)>,
}

impl FdDomain {
    pub fn full() -> FdDomain {
        FdDomain {
            intervals: vec![(INF, SUP)],
        }
    }

    pub fn empty() -> FdDomain {
        FdDomain { intervals: Vec::new() }
    }

    pub fn range(lo: i64, hi: i64) -> FdDomain {
        if lo > hi {
            FdDomain::empty()
        } else {
            FdDomain {
                intervals: vec![(lo, hi)],
            }
        }
    }

    pub fn singleton(v: i64) -> FdDomain {
        FdDomain::range(v, v)
    }

    /// Builds a domain from arbitrary intervals, normalizing order and
    /// merging overlaps and adjacency.
    pub fn from_intervals(mut ivs: Vec<(i64, i64)>) -> FdDomain {
        ivs.retain(|(a, b)| a <= b);
        ivs.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(ivs.len());
        for (a, b) in ivs {
            if let Some(last) = out.last_mut() {
                if a <= last.1.saturating_add(1) {
                    last.1 = last.1.max(b);
                    continue;
                }
            }
            out.push((a, b));
        }
        FdDomain { intervals: out }
    }

    /// Builds a domain from sorted, deduplicated values.
    pub fn from_sorted_values(values: &[i64]) -> FdDomain {
        let mut out: Vec<(i64, i64)> = Vec::new();
        for &v in values {
            match out.last_mut() {
                Some(last) if last.1.checked_add(1) == Some(v) => last.1 = v,
                Some(last) if last.1 >= v => {}
                _ => out.push((v, v)),
            }
        }
        FdDomain { intervals: out }
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lower bound; `INF` when unbounded. Panics on the empty domain.
    pub fn min(&self) -> i64 {
        self.intervals[0].0
    }

    pub fn max(&self) -> i64 {
        self.intervals[self.intervals.len() - 1].1
    }

    pub fn is_finite(&self) -> bool {
        !self.is_empty() && self.min() != INF && self.max() != SUP
    }

    /// Number of values, or `None` when infinite.
    pub fn size(&self) -> Option<u64> {
        if !self.is_finite() && !self.is_empty() {
            return None;
        }
        Some(
            self.intervals
                .iter()
                .map(|(a, b)| (*b as i128 - *a as i128 + 1) as u64)
                .sum(),
        )
    }

    pub fn value(&self) -> Option<i64> {
        match self.intervals.as_slice() {
            [(a, b)] if a == b => Some(*a),
            _ => None,
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.intervals.iter().any(|(a, b)| *a <= v && v <= *b)
    }

    pub fn intersect(&self, other: &FdDomain) -> FdDomain {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        FdDomain { intervals: out }
    }

    pub fn union(&self, other: &FdDomain) -> FdDomain {
        let mut ivs = self.intervals.clone();
        ivs.extend_from_slice(&other.intervals);
        FdDomain::from_intervals(ivs)
    }

    pub fn restrict(&self, lo: i64, hi: i64) -> FdDomain {
        self.intersect(&FdDomain::range(lo, hi))
    }

    pub fn remove(&self, v: i64) -> FdDomain {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for &(a, b) in &self.intervals {
            if v < a || v > b {
                out.push((a, b));
            } else {
                if a < v {
                    out.push((a, v - 1));
                }
                if v < b {
                    out.push((v + 1, b));
                }
            }
        }
        FdDomain { intervals: out }
    }

    fn neg_bound(v: i64) -> i64 {
        match v {
            INF => SUP,
            SUP => INF,
            v => -v,
        }
    }

    /// `{-v | v in self}`.
    pub fn negate(&self) -> FdDomain {
        FdDomain::from_intervals(
            self.intervals
                .iter()
                .map(|&(a, b)| (Self::neg_bound(b), Self::neg_bound(a)))
                .collect(),
        )
    }

    /// `{|v| | v in self}`.
    pub fn abs_image(&self) -> FdDomain {
        FdDomain::from_intervals(
            self.intervals
                .iter()
                .map(|&(a, b)| {
                    if a >= 0 {
                        (a, b)
                    } else if b <= 0 {
                        (Self::neg_bound(b), Self::neg_bound(a))
                    } else {
                        (0, Self::neg_bound(a).max(b))
                    }
                })
                .collect(),
        )
    }

    /// All values in ascending order. Only meaningful for finite domains.
    pub fn values(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        debug_assert!(self.is_finite() || self.is_empty());
        self.intervals.iter().flat_map(|&(a, b)| a..=b)
    }
}

impl fmt::Display for FdDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1..0");
        }
        let bound = |v: i64| match v {
            INF => "inf".to_owned(),
            SUP => "sup".to_owned(),
            v => v.to_string(),
        };
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str("\\/")?;
            }
            if a == b {
                write!(f, "{}", bound(*a))?;
            } else {
                write!(f, "{}..{}", bound(*a), bound(*b))?;
            }
        }
        Ok(())
    }
}
