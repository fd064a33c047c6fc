//! Parameter band tables.
//!
//! Every raw-quantity-to-score mapping in the engine is driven by the tables
//! in this module, and the service publishes them verbatim so that clients
//! never carry their own copy of the bands. Numeric bands are intervals with
//! explicit closedness; barrier tables for masks and ventilation are keyed by
//! option name instead.

use serde::Serialize;

/// Default limit on the number of persons met before an activity is refused.
pub const DEFAULT_MAX_PERSONS: u32 = 100;

/// An interval of raw values. `upper: None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub lower_inclusive: bool,
    pub upper: Option<f64>,
    pub upper_inclusive: bool,
}

impl Interval {
    const fn new(lower: f64, lower_inclusive: bool, upper: Option<f64>, upper_inclusive: bool) -> Self {
        Self {
            lower,
            lower_inclusive,
            upper,
            upper_inclusive,
        }
    }

    /// `[lower, upper)`
    const fn half_open(lower: f64, upper: f64) -> Self {
        Self::new(lower, true, Some(upper), false)
    }

    /// `[lower, upper]`
    const fn closed(lower: f64, upper: f64) -> Self {
        Self::new(lower, true, Some(upper), true)
    }

    /// `[lower, inf)`
    const fn at_least(lower: f64) -> Self {
        Self::new(lower, true, None, false)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_inclusive { x >= self.lower } else { x > self.lower };
        let below = match self.upper {
            None => true,
            Some(u) if self.upper_inclusive => x <= u,
            Some(u) => x < u,
        };
        above && below
    }
}

/// One row of a parameter table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub score: u8,
    pub label: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<Interval>,
    /// Option name for enumerated barrier tables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub option: Option<&'static str>,
    /// Raw value a mitigation uses when it moves a scenario into this band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative: Option<f64>,
}

impl Band {
    const fn numeric(score: u8, label: &'static str, range: Interval, representative: Option<f64>) -> Self {
        Self {
            score,
            label,
            range: Some(range),
            option: None,
            representative,
        }
    }

    const fn choice(score: u8, label: &'static str, option: &'static str) -> Self {
        Self {
            score,
            label,
            range: None,
            option: Some(option),
            representative: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Persons,
    WeeklyIncidence,
    CumulativeExposure,
    ExposureTime,
    Distance,
    Mask,
    Ventilation,
}

/// A complete parameter table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandTable {
    pub parameter: Parameter,
    pub symbol: &'static str,
    pub title: &'static str,
    /// Scenario document field the table scores.
    pub field: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<&'static str>,
    /// Barriers are subtracted from the frequency score.
    pub barrier: bool,
    pub bands: &'static [Band],
}

impl BandTable {
    pub fn min_score(&self) -> u8 {
        self.bands.iter().map(|b| b.score).min().unwrap_or(0)
    }

    pub fn max_score(&self) -> u8 {
        self.bands.iter().map(|b| b.score).max().unwrap_or(0)
    }

    pub fn band(&self, score: u8) -> Option<&'static Band> {
        self.bands.iter().find(|b| b.score == score)
    }

    /// Score of the numeric band containing `x`.
    pub(crate) fn score_of(&self, x: f64) -> Option<u8> {
        self.bands
            .iter()
            .find(|b| b.range.is_some_and(|r| r.contains(x)))
            .map(|b| b.score)
    }
}

pub const PERSONS: BandTable = BandTable {
    parameter: Parameter::Persons,
    symbol: "N",
    title: "Number of people met",
    field: "persons",
    unit: Some("persons"),
    barrier: false,
    bands: &[
        Band::numeric(1, "Single person", Interval::closed(1.0, 1.0), Some(1.0)),
        Band::numeric(2, "Several people e. g. a couple or small group", Interval::closed(2.0, 5.0), Some(5.0)),
        Band::numeric(3, "A large group e. g. 10 persons", Interval::closed(6.0, 15.0), Some(15.0)),
        Band::numeric(4, "Many people e. g. 30 persons", Interval::closed(16.0, 50.0), Some(50.0)),
        // Capped by the configured person limit; the limit itself is the representative.
        Band::numeric(5, "Very many people e. g. 100 persons", Interval::at_least(51.0), None),
    ],
};

pub const WEEKLY_INCIDENCE: BandTable = BandTable {
    parameter: Parameter::WeeklyIncidence,
    symbol: "W",
    title: "Weekly incidence",
    field: "weekly_incidence",
    unit: Some("cases per 100,000 per week"),
    barrier: false,
    bands: &[
        Band::numeric(1, "Very low e. g. below 10", Interval::half_open(0.0, 10.0), None),
        Band::numeric(2, "Low e. g. below 35", Interval::half_open(10.0, 35.0), None),
        Band::numeric(3, "Moderate, e. g. below 100", Interval::half_open(35.0, 100.0), None),
        Band::numeric(4, "High, e. g. below 300", Interval::half_open(100.0, 300.0), None),
        Band::numeric(5, "Very high", Interval::at_least(300.0), None),
    ],
};

pub const CUMULATIVE_EXPOSURE: BandTable = BandTable {
    parameter: Parameter::CumulativeExposure,
    symbol: "C",
    title: "Cumulative exposure",
    field: "exposures_per_week",
    unit: Some("exposures per week"),
    barrier: false,
    bands: &[
        Band::numeric(0, "Exposure once per week or less", Interval::closed(0.0, 1.0), Some(1.0)),
        Band::numeric(
            1,
            "Exposure several times per week",
            Interval::new(1.0, false, Some(7.0), false),
            Some(6.0),
        ),
        Band::numeric(2, "Daily exposure or more often", Interval::at_least(7.0), None),
    ],
};

pub const EXPOSURE_TIME: BandTable = BandTable {
    parameter: Parameter::ExposureTime,
    symbol: "T",
    title: "Single exposure",
    field: "duration_minutes",
    unit: Some("minutes"),
    barrier: false,
    bands: &[
        Band::numeric(1, "Very short, below 1 min", Interval::new(0.0, false, Some(1.0), false), Some(0.5)),
        Band::numeric(2, "Short, e. g. below 5 min", Interval::half_open(1.0, 5.0), Some(4.0)),
        Band::numeric(3, "Medium e. g. below 10 min", Interval::half_open(5.0, 10.0), Some(9.0)),
        Band::numeric(4, "Long, e. g. below 30 min", Interval::half_open(10.0, 30.0), Some(29.0)),
        Band::numeric(5, "Very long, e. g. below 90 min", Interval::half_open(30.0, 90.0), Some(89.0)),
        Band::numeric(6, "Above", Interval::at_least(90.0), None),
    ],
};

pub const DISTANCE: BandTable = BandTable {
    parameter: Parameter::Distance,
    symbol: "D",
    title: "Average distance",
    field: "distance_meters",
    unit: Some("meters"),
    barrier: true,
    bands: &[
        Band::numeric(0, "Very low e. g. below 2m", Interval::half_open(0.0, 2.0), None),
        Band::numeric(1, "Low e. g. below 5m", Interval::half_open(2.0, 5.0), Some(2.0)),
        Band::numeric(2, "Large", Interval::at_least(5.0), Some(5.0)),
    ],
};

pub const MASK: BandTable = BandTable {
    parameter: Parameter::Mask,
    symbol: "M",
    title: "Type of masks",
    field: "mask",
    unit: None,
    barrier: true,
    bands: &[
        Band::choice(0, "None", "none"),
        Band::choice(1, "Simple everyday mask", "everyday"),
        Band::choice(2, "Medical mask e. g. FFP2", "ffp2"),
        Band::choice(3, "Better", "better"),
    ],
};

pub const VENTILATION: BandTable = BandTable {
    parameter: Parameter::Ventilation,
    symbol: "V",
    title: "Ventilation conditions",
    field: "ventilation",
    unit: None,
    barrier: true,
    bands: &[
        Band::choice(0, "None", "none"),
        Band::choice(1, "Frequent ventilation e. g. open windows", "open_windows"),
        Band::choice(2, "Air condition with filters", "filtered_ac"),
        Band::choice(3, "Outdoor", "outdoor"),
    ],
};

/// All seven tables in formula order `N W C T D M V`.
pub const ALL_TABLES: [&BandTable; 7] = [
    &PERSONS,
    &WEEKLY_INCIDENCE,
    &CUMULATIVE_EXPOSURE,
    &EXPOSURE_TIME,
    &DISTANCE,
    &MASK,
    &VENTILATION,
];
