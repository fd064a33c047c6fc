//! Error types shared across the engine.

use thiserror::Error;

/// Failures of the raw-quantity-to-score mappings and of the score arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("{parameter} must be a finite number, got {value}")]
    NotFinite { parameter: &'static str, value: f64 },

    #[error("{parameter} must not be negative, got {value}")]
    Negative { parameter: &'static str, value: f64 },

    #[error("duration must be positive, got {0} minutes")]
    NonPositiveDuration(f64),

    #[error("score {component}={value} outside [{min}, {max}]")]
    OutOfRange {
        component: &'static str,
        value: i32,
        min: i32,
        max: i32,
    },

    /// Nobody outside the household is met; there is nothing to score.
    #[error("no exposure: zero persons met")]
    NoExposure,

    #[error("{persons} persons exceeds the limit of {max_persons}; the activity should not be performed")]
    ActivityRefused { persons: u32, max_persons: u32 },
}

/// Invalid person profile.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("age {0} is outside [0, 150]")]
    AgeOutOfRange(u32),
}

/// Failures of the physical-rationale helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("ratio must be positive and finite, got {0}")]
    NonPositiveRatio(f64),

    #[error("distance must be positive and finite, got {0}")]
    NonPositiveDistance(f64),
}
