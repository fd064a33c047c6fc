//! Proptest strategies shared by the property suites.

use proptest::prelude::*;
use riskgate_core::matrix::MIN_F;
use riskgate_core::{
    ComponentScores, Mask, MedicalCondition, OccupationalExposure, PersonProfile, RawScenario, RiskClass, RiskMatrix,
    SeverityClass, Ventilation,
};

pub fn severity() -> impl Strategy<Value = SeverityClass> {
    prop::sample::select(SeverityClass::ALL.to_vec())
}

pub fn mask() -> impl Strategy<Value = Mask> {
    prop::sample::select(Mask::ALL.to_vec())
}

pub fn ventilation() -> impl Strategy<Value = Ventilation> {
    prop::sample::select(Ventilation::ALL.to_vec())
}

pub fn profile() -> impl Strategy<Value = PersonProfile> {
    (
        0u32..=100,
        any::<bool>(),
        prop::sample::select(vec![
            OccupationalExposure::VeryHigh,
            OccupationalExposure::High,
            OccupationalExposure::Moderate,
            OccupationalExposure::Low,
            OccupationalExposure::None,
        ]),
        prop::sample::select(vec![
            MedicalCondition::DementiaOrMentalHandicap,
            MedicalCondition::Severe,
            MedicalCondition::Moderate,
            MedicalCondition::None,
        ]),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(age, care, exposure, condition, job, teacher)| PersonProfile {
            age,
            care_home_resident: care,
            occupational_exposure: exposure,
            medical_condition: condition,
            system_relevant_job: job,
            teacher,
        })
}

pub fn scenario() -> impl Strategy<Value = RawScenario> {
    (
        0u32..=150,
        0.0f64..600.0,
        0.0f64..14.0,
        0.01f64..600.0,
        0.0f64..12.0,
        mask(),
        ventilation(),
    )
        .prop_map(|(persons, incidence, per_week, minutes, meters, mask, ventilation)| RawScenario {
            label: String::new(),
            persons,
            weekly_incidence: incidence,
            exposures_per_week: per_week,
            duration_minutes: minutes,
            distance_meters: meters,
            mask,
            ventilation,
        })
}

pub fn components() -> impl Strategy<Value = ComponentScores> {
    (1u8..=5, 1u8..=5, 0u8..=2, 1u8..=6, 0u8..=2, 0u8..=3, 0u8..=3)
        .prop_map(|(n, w, c, t, d, m, v)| ComponentScores { n, w, c, t, d, m, v })
}

/// Valid matrices built from per-column thresholds: the first F at which each
/// column reaches Yellow, Orange and Red (16 = never). Thresholds strictly
/// increase down a column and never exceed those of a less severe column.
pub fn valid_matrix() -> impl Strategy<Value = RiskMatrix> {
    prop::collection::vec(prop::collection::btree_set(3i32..=18, 3), 6).prop_map(|columns| {
        let mut thresholds: Vec<[i32; 3]> = columns
            .into_iter()
            .map(|set| {
                let v: Vec<i32> = set.into_iter().collect();
                [v[0].min(16), v[1].min(16), v[2].min(16)]
            })
            .collect();
        for s in (0..5).rev() {
            let milder = thresholds[s + 1];
            for (t, m) in thresholds[s].iter_mut().zip(milder) {
                *t = (*t).min(m);
            }
        }
        let mut rows = [[RiskClass::Green; 6]; 13];
        for (r, row) in rows.iter_mut().enumerate() {
            let f = MIN_F + r as i32;
            for (s, cell) in row.iter_mut().enumerate() {
                let level = thresholds[s].iter().filter(|&&t| f >= t).count() as u8;
                *cell = RiskClass::from_level(level).unwrap();
            }
        }
        RiskMatrix::new("generated", "0", rows)
    })
}

pub fn cells(m: &RiskMatrix) -> [[RiskClass; 6]; 13] {
    let mut out = [[RiskClass::Green; 6]; 13];
    for (f, row) in m.rows() {
        out[(f - MIN_F) as usize] = *row;
    }
    out
}
