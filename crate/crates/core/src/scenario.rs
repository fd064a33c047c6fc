//! Scenario documents and their conversion to [`RawScenario`].
//!
//! A scenario document is a JSON object:
//!
//! ```json
//! {
//!   "label": "click & meet shopping",
//!   "persons": 30,
//!   "weekly_incidence": 80,
//!   "exposures_per_week": 3,
//!   "duration_minutes": 4,
//!   "distance_meters": 1,
//!   "mask": "none",
//!   "ventilation": "none"
//! }
//! ```
//!
//! `region` (plus an optional ISO `date`) may replace `weekly_incidence`; it is
//! resolved against an incidence table. Barrier fields default to no barrier.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::incidence::{IncidenceTable, ResolvedIncidence};
use crate::scoring::{Mask, Ventilation};

/// Measurable quantities of a planned activity.
///
/// `persons` counts untested persons from outside the household; household
/// members and currently tested or fully vaccinated persons are left out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawScenario {
    #[serde(skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub persons: u32,
    pub weekly_incidence: f64,
    pub exposures_per_week: f64,
    pub duration_minutes: f64,
    pub distance_meters: f64,
    pub mask: Mask,
    pub ventilation: Ventilation,
}

impl Default for RawScenario {
    fn default() -> Self {
        Self {
            label: String::new(),
            persons: 1,
            weekly_incidence: 0.0,
            exposures_per_week: 1.0,
            duration_minutes: 1.0,
            distance_meters: 0.0,
            mask: Mask::None,
            ventilation: Ventilation::None,
        }
    }
}

/// A scenario document or request body that failed to parse or validate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Dotted path of the offending field, when known.
    pub field: Option<String>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: Some(field.to_string()),
            line: None,
            column: None,
            message: message.into(),
        }
    }

    /// Prepends `prefix` to the field path.
    pub fn within(mut self, prefix: &str) -> Self {
        self.field = Some(match self.field.take() {
            Some(f) if !f.is_empty() && f != "." => format!("{prefix}.{f}"),
            _ => prefix.to_string(),
        });
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, "line {line}, column {column}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}

/// Deserializes JSON text, reporting the failing field path and position.
pub fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError {
            field: (path != "." && !path.is_empty()).then_some(path),
            line: Some(inner.line()),
            column: Some(inner.column()),
            message: strip_position(&inner.to_string()),
        }
    })?;
    de.end().map_err(|e| ParseError {
        field: None,
        line: Some(e.line()),
        column: Some(e.column()),
        message: strip_position(&e.to_string()),
    })?;
    Ok(value)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(idx) => message[..idx].to_string(),
        None => message.to_string(),
    }
}

/// The scenario schema as written by users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub persons: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weekly_incidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    pub exposures_per_week: f64,
    pub duration_minutes: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_meters: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Mask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ventilation: Option<Ventilation>,
}

/// Resolves `region` fields of scenario documents.
#[derive(Debug, Clone, Copy)]
pub struct IncidenceContext<'a> {
    pub table: &'a IncidenceTable,
    /// Used when a document names a region but no date.
    pub today: NaiveDate,
}

/// A validated scenario plus the incidence record it was resolved against.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub scenario: RawScenario,
    pub incidence: Option<ResolvedIncidence>,
}

fn finite(field: &str, value: f64) -> Result<f64, ParseError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParseError::field(field, "must be a finite number"))
    }
}

fn non_negative(field: &str, value: f64) -> Result<f64, ParseError> {
    if finite(field, value)? < 0.0 {
        return Err(ParseError::field(field, format!("must not be negative, got {value}")));
    }
    Ok(value)
}

impl ScenarioDocument {
    /// Validates ranges and resolves the incidence.
    pub fn resolve(self, incidence: Option<IncidenceContext<'_>>) -> Result<ResolvedScenario, ParseError> {
        let persons = u32::try_from(self.persons)
            .map_err(|_| ParseError::field("persons", format!("must be an integer in 0..={}, got {}", u32::MAX, self.persons)))?;
        let exposures_per_week = non_negative("exposures_per_week", self.exposures_per_week)?;
        let duration_minutes = finite("duration_minutes", self.duration_minutes)?;
        if duration_minutes <= 0.0 {
            return Err(ParseError::field(
                "duration_minutes",
                format!("must be positive, got {duration_minutes}"),
            ));
        }
        let distance_meters = non_negative("distance_meters", self.distance_meters.unwrap_or(0.0))?;

        let (weekly_incidence, resolved) = match (self.weekly_incidence, self.region) {
            (Some(_), Some(_)) => {
                return Err(ParseError::field("region", "give either weekly_incidence or region, not both"))
            }
            (None, None) => return Err(ParseError::field("weekly_incidence", "missing field (or give `region`)")),
            (Some(w), None) => {
                if self.date.is_some() {
                    return Err(ParseError::field("date", "only meaningful together with `region`"));
                }
                (non_negative("weekly_incidence", w)?, None)
            }
            (None, Some(region)) => {
                let ctx = incidence
                    .ok_or_else(|| ParseError::field("region", "no incidence source is configured to resolve regions"))?;
                let date = self.date.unwrap_or(ctx.today);
                let r = ctx
                    .table
                    .resolve(&region, date)
                    .map_err(|e| ParseError::field("region", e.to_string()))?;
                (r.weekly_incidence, Some(r))
            }
        };

        Ok(ResolvedScenario {
            scenario: RawScenario {
                label: self.label.unwrap_or_default(),
                persons,
                weekly_incidence,
                exposures_per_week,
                duration_minutes,
                distance_meters,
                mask: self.mask.unwrap_or_default(),
                ventilation: self.ventilation.unwrap_or_default(),
            },
            incidence: resolved,
        })
    }
}

impl From<&RawScenario> for ScenarioDocument {
    fn from(raw: &RawScenario) -> Self {
        Self {
            label: (!raw.label.is_empty()).then(|| raw.label.clone()),
            persons: i64::from(raw.persons),
            weekly_incidence: Some(raw.weekly_incidence),
            region: None,
            date: None,
            exposures_per_week: raw.exposures_per_week,
            duration_minutes: raw.duration_minutes,
            distance_meters: Some(raw.distance_meters),
            mask: Some(raw.mask),
            ventilation: Some(raw.ventilation),
        }
    }
}

/// Parses a scenario document that states `weekly_incidence` directly.
pub fn parse_scenario(document: &str) -> Result<RawScenario, ParseError> {
    let doc: ScenarioDocument = from_json_str(document)?;
    doc.resolve(None).map(|r| r.scenario)
}

/// Parses a scenario document, resolving `region` against `incidence`.
pub fn parse_scenario_with(document: &str, incidence: IncidenceContext<'_>) -> Result<ResolvedScenario, ParseError> {
    let doc: ScenarioDocument = from_json_str(document)?;
    doc.resolve(Some(incidence))
}
