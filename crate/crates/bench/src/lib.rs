//! Fixtures shared by the benchmarks.

use riskgate_core::{CalibrationPoint, Expectation, Mask, OccupationalExposure, PersonProfile, RawScenario, RiskClass, SeverityClass};

pub fn shopping() -> RawScenario {
    RawScenario {
        label: "shopping".into(),
        persons: 30,
        weekly_incidence: 80.0,
        exposures_per_week: 3.0,
        duration_minutes: 4.0,
        ..Default::default()
    }
}

pub fn metro() -> RawScenario {
    RawScenario {
        label: "metro".into(),
        persons: 30,
        weekly_incidence: 20.0,
        exposures_per_week: 10.0,
        duration_minutes: 7.0,
        mask: Mask::MedicalFfp2,
        ..Default::default()
    }
}

pub fn nurse() -> PersonProfile {
    PersonProfile {
        age: 55,
        occupational_exposure: OccupationalExposure::VeryHigh,
        ..Default::default()
    }
}

/// `count` points spread over the whole matrix, cycling through expectations.
pub fn calibration_points(count: usize) -> Vec<CalibrationPoint> {
    let expectations = [
        Expectation::Acceptable,
        Expectation::AtMost(RiskClass::Yellow),
        Expectation::AtMost(RiskClass::Orange),
        Expectation::Forbidden,
    ];
    (0..count)
        .map(|i| {
            CalibrationPoint::new(
                SeverityClass::ALL[i % 6],
                3 + (i * 7 % 13) as i32,
                expectations[i % expectations.len()],
                "",
            )
        })
        .collect()
}
