//! Scenario assessment against a person's severity class and a risk matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ProfileError, ScoreError};
use crate::matrix::{lookup_risk, validate_matrix, MatrixError, RiskMatrix};
use crate::risk::RiskClass;
use crate::scenario::RawScenario;
use crate::scoring::{score_c, score_d, score_m, score_n, score_t, score_v, score_w, ComponentScores, Mask, ScoredScenario};
use crate::severity::{classify_severity, PersonProfile, SeverityClass};
use crate::tables::DEFAULT_MAX_PERSONS;

/// Attached to every schedule assessment.
pub const JOINT_EFFECT_WARNING: &str =
    "entries are assessed independently; the joint effect of combining these activities is not modeled";

pub const MASK_ADVICE: &str = "wearing a mask is still advised";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessError {
    #[error(transparent)]
    Profile(#[from] ProfileError),

    #[error(transparent)]
    Score(#[from] ScoreError),

    #[error(transparent)]
    Matrix(#[from] MatrixError),

    #[error("max_persons must be at least 1")]
    InvalidPersonLimit,

    #[error("schedule has no entries")]
    EmptySchedule,

    #[error("entry {index}: {source}")]
    Entry {
        index: usize,
        #[source]
        source: Box<AssessError>,
    },
}

/// Scoring result of a raw scenario before the matrix lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreOutcome {
    Scored(ScoredScenario),
    NoExposure,
    Refused { persons: u32, max_persons: u32 },
}

/// Maps all seven raw quantities to scores.
///
/// The non-person fields are validated first, so a malformed scenario is an
/// error even when nobody is met.
pub fn score_scenario(scenario: &RawScenario, max_persons: u32) -> Result<ScoreOutcome, ScoreError> {
    let w = score_w(scenario.weekly_incidence)?;
    let c = score_c(scenario.exposures_per_week)?;
    let t = score_t(scenario.duration_minutes)?;
    let d = score_d(scenario.distance_meters)?;
    let m = score_m(scenario.mask);
    let v = score_v(scenario.ventilation);
    let n = match score_n(scenario.persons, max_persons) {
        Ok(n) => n,
        Err(ScoreError::NoExposure) => return Ok(ScoreOutcome::NoExposure),
        Err(ScoreError::ActivityRefused { persons, max_persons }) => {
            return Ok(ScoreOutcome::Refused { persons, max_persons })
        }
        Err(e) => return Err(e),
    };
    ScoredScenario::new(ComponentScores { n, w, c, t, d, m, v }).map(ScoreOutcome::Scored)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assessment {
    pub severity: SeverityClass,
    /// Unclamped frequency score; absent when nothing could be scored.
    pub f: Option<i32>,
    pub risk: RiskClass,
    pub recommendation: String,
    /// The person count exceeds the limit and the activity should not be performed.
    pub refused: bool,
    /// Nobody outside the household is met.
    pub no_exposure: bool,
    pub scored: Option<ScoredScenario>,
    pub notes: Vec<String>,
}

/// Ordered list of activities assessed one by one.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    entries: Vec<RawScenario>,
}

impl Schedule {
    pub fn new(entries: Vec<RawScenario>) -> Result<Self, AssessError> {
        if entries.is_empty() {
            return Err(AssessError::EmptySchedule);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[RawScenario] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub index: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub assessment: Assessment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleAssessment {
    pub entries: Vec<ScheduleEntry>,
    /// Worst class over all entries.
    pub headline: RiskClass,
    pub warning: String,
}

/// A validated matrix plus the person limit; all assessments go through it.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessor {
    matrix: RiskMatrix,
    max_persons: u32,
}

impl Assessor {
    pub fn new(matrix: RiskMatrix, max_persons: u32) -> Result<Self, AssessError> {
        if max_persons == 0 {
            return Err(AssessError::InvalidPersonLimit);
        }
        let report = validate_matrix(&matrix);
        if !report.is_valid() {
            return Err(MatrixError::Invalid(report).into());
        }
        Ok(Self { matrix, max_persons })
    }

    pub fn matrix(&self) -> &RiskMatrix {
        &self.matrix
    }

    pub fn max_persons(&self) -> u32 {
        self.max_persons
    }

    /// Class of `(severity, f)` in this assessor's matrix.
    pub fn classify(&self, severity: SeverityClass, f: i32) -> RiskClass {
        lookup_risk(&self.matrix, severity, f)
    }

    pub fn assess(&self, scenario: &RawScenario, profile: &PersonProfile) -> Result<Assessment, AssessError> {
        let severity = classify_severity(profile)?;
        self.assess_for(scenario, severity)
    }

    /// Assessment for an already known severity class.
    pub fn assess_for(&self, scenario: &RawScenario, severity: SeverityClass) -> Result<Assessment, AssessError> {
        let outcome = score_scenario(scenario, self.max_persons)?;
        let mut notes = Vec::new();
        let (f, risk, refused, no_exposure, scored) = match outcome {
            ScoreOutcome::Scored(scored) => (Some(scored.f), self.classify(severity, scored.f), false, false, Some(scored)),
            ScoreOutcome::NoExposure => {
                notes.push("no persons from outside the household are met; there is no exposure to score".to_string());
                (None, RiskClass::Green, false, true, None)
            }
            ScoreOutcome::Refused { persons, max_persons } => {
                notes.push(format!(
                    "{persons} persons exceeds the limit of {max_persons}: gatherings this large may spread \
                     infection faster than the model can capture, so the activity should not be performed"
                ));
                (None, RiskClass::Red, true, false, None)
            }
        };
        if risk == RiskClass::Green && !no_exposure && scenario.mask == Mask::None {
            notes.push(MASK_ADVICE.to_string());
        }
        Ok(Assessment {
            severity,
            f,
            risk,
            recommendation: risk.recommendation().to_string(),
            refused,
            no_exposure,
            scored,
            notes,
        })
    }

    /// Assesses each entry independently; the headline is the worst class.
    pub fn assess_schedule(&self, schedule: &Schedule, profile: &PersonProfile) -> Result<ScheduleAssessment, AssessError> {
        let severity = classify_severity(profile)?;
        let results: Vec<Result<Assessment, AssessError>> = schedule
            .entries
            .par_iter()
            .map(|entry| self.assess_for(entry, severity))
            .collect();
        let mut entries = Vec::with_capacity(results.len());
        for (index, (result, scenario)) in results.into_iter().zip(&schedule.entries).enumerate() {
            let assessment = result.map_err(|e| AssessError::Entry {
                index,
                source: Box::new(e),
            })?;
            entries.push(ScheduleEntry {
                index,
                label: scenario.label.clone(),
                assessment,
            });
        }
        let headline = entries
            .iter()
            .map(|e| e.assessment.risk)
            .max()
            .expect("schedules are non-empty");
        Ok(ScheduleAssessment {
            entries,
            headline,
            warning: JOINT_EFFECT_WARNING.to_string(),
        })
    }
}

/// One-shot assessment with the default person limit.
pub fn assess(scenario: &RawScenario, profile: &PersonProfile, matrix: &RiskMatrix) -> Result<Assessment, AssessError> {
    Assessor::new(matrix.clone(), DEFAULT_MAX_PERSONS)?.assess(scenario, profile)
}

pub fn assess_schedule(
    schedule: &Schedule,
    profile: &PersonProfile,
    matrix: &RiskMatrix,
) -> Result<ScheduleAssessment, AssessError> {
    Assessor::new(matrix.clone(), DEFAULT_MAX_PERSONS)?.assess_schedule(schedule, profile)
}
