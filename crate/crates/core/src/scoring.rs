//! Raw quantities to integer scores, and the frequency score `F`.
//!
//! `F = N + W + C + T - D - M - V` sums scores on a base-sqrt(10) log scale,
//! so multiplying the underlying dose factors adds their scores.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ScoreError;
use crate::tables::{self, BandTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mask {
    #[default]
    None,
    Everyday,
    #[serde(rename = "ffp2", alias = "medical_ffp2")]
    MedicalFfp2,
    Better,
}

impl Mask {
    pub const ALL: [Mask; 4] = [Self::None, Self::Everyday, Self::MedicalFfp2, Self::Better];

    pub fn as_str(self) -> &'static str {
        tables::MASK.bands[self as usize].option.unwrap_or_default()
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ventilation {
    #[default]
    None,
    OpenWindows,
    FilteredAc,
    Outdoor,
}

impl Ventilation {
    pub const ALL: [Ventilation; 4] = [Self::None, Self::OpenWindows, Self::FilteredAc, Self::Outdoor];

    pub fn as_str(self) -> &'static str {
        tables::VENTILATION.bands[self as usize].option.unwrap_or_default()
    }
}

impl fmt::Display for Ventilation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_finite(parameter: &'static str, value: f64) -> Result<(), ScoreError> {
    if !value.is_finite() {
        return Err(ScoreError::NotFinite { parameter, value });
    }
    Ok(())
}

fn check_non_negative(parameter: &'static str, value: f64) -> Result<(), ScoreError> {
    check_finite(parameter, value)?;
    if value < 0.0 {
        return Err(ScoreError::Negative { parameter, value });
    }
    Ok(())
}

fn banded(table: &BandTable, value: f64) -> u8 {
    table
        .score_of(value)
        .expect("numeric bands cover the validated domain")
}

/// `N`: persons met. Zero persons is no exposure; more than `max_persons` is refused.
pub fn score_n(persons: u32, max_persons: u32) -> Result<u8, ScoreError> {
    if persons == 0 {
        return Err(ScoreError::NoExposure);
    }
    if persons > max_persons {
        return Err(ScoreError::ActivityRefused { persons, max_persons });
    }
    Ok(banded(&tables::PERSONS, f64::from(persons)))
}

/// `W`: weekly incidence per 100,000 inhabitants.
pub fn score_w(weekly_incidence: f64) -> Result<u8, ScoreError> {
    check_non_negative("weekly_incidence", weekly_incidence)?;
    Ok(banded(&tables::WEEKLY_INCIDENCE, weekly_incidence))
}

/// `C`: how often the exposure is repeated per week.
pub fn score_c(exposures_per_week: f64) -> Result<u8, ScoreError> {
    check_non_negative("exposures_per_week", exposures_per_week)?;
    Ok(banded(&tables::CUMULATIVE_EXPOSURE, exposures_per_week))
}

/// `T`: duration of a single exposure in minutes.
pub fn score_t(duration_minutes: f64) -> Result<u8, ScoreError> {
    check_finite("duration_minutes", duration_minutes)?;
    if duration_minutes <= 0.0 {
        return Err(ScoreError::NonPositiveDuration(duration_minutes));
    }
    Ok(banded(&tables::EXPOSURE_TIME, duration_minutes))
}

/// `D`: average distance barrier.
pub fn score_d(distance_meters: f64) -> Result<u8, ScoreError> {
    check_non_negative("distance_meters", distance_meters)?;
    Ok(banded(&tables::DISTANCE, distance_meters))
}

/// `M`: mask barrier.
pub fn score_m(mask: Mask) -> u8 {
    tables::MASK.bands[mask as usize].score
}

/// `V`: ventilation barrier.
pub fn score_v(ventilation: Ventilation) -> u8 {
    tables::VENTILATION.bands[ventilation as usize].score
}

/// The seven component scores of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentScores {
    pub n: u8,
    pub w: u8,
    pub c: u8,
    pub t: u8,
    pub d: u8,
    pub m: u8,
    pub v: u8,
}

impl ComponentScores {
    pub fn validate(&self) -> Result<(), ScoreError> {
        let checks: [(&'static str, u8, &BandTable); 7] = [
            ("n", self.n, &tables::PERSONS),
            ("w", self.w, &tables::WEEKLY_INCIDENCE),
            ("c", self.c, &tables::CUMULATIVE_EXPOSURE),
            ("t", self.t, &tables::EXPOSURE_TIME),
            ("d", self.d, &tables::DISTANCE),
            ("m", self.m, &tables::MASK),
            ("v", self.v, &tables::VENTILATION),
        ];
        for (component, value, table) in checks {
            let (min, max) = (table.min_score(), table.max_score());
            if !(min..=max).contains(&value) {
                return Err(ScoreError::OutOfRange {
                    component,
                    value: i32::from(value),
                    min: i32::from(min),
                    max: i32::from(max),
                });
            }
        }
        Ok(())
    }
}

/// Exact `N + W + C + T - D - M - V`, unclamped.
pub fn frequency_score(scores: &ComponentScores) -> Result<i32, ScoreError> {
    scores.validate()?;
    let s = scores;
    Ok(i32::from(s.n) + i32::from(s.w) + i32::from(s.c) + i32::from(s.t)
        - i32::from(s.d)
        - i32::from(s.m)
        - i32::from(s.v))
}

/// Component scores together with the derived frequency score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoredScenario {
    pub n: u8,
    pub w: u8,
    pub c: u8,
    pub t: u8,
    pub d: u8,
    pub m: u8,
    pub v: u8,
    pub f: i32,
}

impl ScoredScenario {
    pub fn new(scores: ComponentScores) -> Result<Self, ScoreError> {
        let f = frequency_score(&scores)?;
        let ComponentScores { n, w, c, t, d, m, v } = scores;
        Ok(Self { n, w, c, t, d, m, v, f })
    }

    pub fn components(&self) -> ComponentScores {
        ComponentScores {
            n: self.n,
            w: self.w,
            c: self.c,
            t: self.t,
            d: self.d,
            m: self.m,
            v: self.v,
        }
    }
}
