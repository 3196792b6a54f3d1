//! Retry policy and the linear temperature schedule.

use std::time::Duration;

use deduce_core::Budget;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("attempt index {index} outside [0, {max})")]
    Range { index: u32, max: u32 },
    #[error("invalid retry policy: {0}")]
    Invalid(String),
}

/// Invariants: `max_attempts >= 1`, `temp_start <= temp_end`, both finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub temp_start: f64,
    pub temp_end: f64,
    pub max_steps: u64,
    pub timeout_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        let b = Budget::default();
        RetryPolicy {
            max_attempts: 50,
            temp_start: 0.0,
            temp_end: 0.3,
            max_steps: b.max_steps,
            timeout_ms: b.timeout.as_millis() as u64,
        }
    }
}

impl RetryPolicy {
    pub fn new(max_attempts: u32, temp_start: f64, temp_end: f64, budget: Budget) -> Result<Self, PolicyError> {
        let p = RetryPolicy {
            max_attempts,
            temp_start,
            temp_end,
            max_steps: budget.max_steps,
            timeout_ms: budget.timeout.as_millis() as u64,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.max_attempts == 0 {
            return Err(PolicyError::Invalid("max_attempts must be at least 1".into()));
        }
        if !self.temp_start.is_finite() || !self.temp_end.is_finite() || self.temp_start > self.temp_end {
            return Err(PolicyError::Invalid(format!(
                "temperature range {}..{} is not nondecreasing",
                self.temp_start, self.temp_end
            )));
        }
        self.budget().map(|_| ())
    }

    /// Per-attempt engine budget.
    pub fn budget(&self) -> Result<Budget, PolicyError> {
        Budget::new(self.max_steps, Duration::from_millis(self.timeout_ms))
            .map_err(|e| PolicyError::Invalid(e.to_string()))
    }

    /// `temp_start + (temp_end - temp_start) * k / (max_attempts - 1)`.
    /// The last index returns `temp_end` exactly.
    pub fn temperature_at(&self, k: u32) -> Result<f64, PolicyError> {
        if k >= self.max_attempts {
            return Err(PolicyError::Range {
                index: k,
                max: self.max_attempts,
            });
        }
        if self.max_attempts == 1 {
            return Ok(self.temp_start);
        }
        if k == self.max_attempts - 1 {
            return Ok(self.temp_end);
        }
        let span = self.temp_end - self.temp_start;
        Ok(self.temp_start + span * k as f64 / (self.max_attempts - 1) as f64)
    }
}
