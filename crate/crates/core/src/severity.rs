//! Individual severity classes and the profile rules that select them.
//!
//! Classes follow the six vaccination-priority groups: `I` is the most
//! vulnerable group, `VI` everybody else. The derived `Ord` therefore runs
//! from most to least severe.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ProfileError;

/// Oldest age accepted by [`PersonProfile::validate`].
pub const MAX_AGE: u32 = 150;

/// Individual impact category `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeverityClass {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl SeverityClass {
    /// All classes, most severe first.
    pub const ALL: [SeverityClass; 6] = [Self::I, Self::II, Self::III, Self::IV, Self::V, Self::VI];

    /// Ordinal 1..=6, with 1 the most severe.
    pub fn ordinal(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_ordinal(ordinal: u8) -> Option<Self> {
        Self::ALL.get(usize::from(ordinal).checked_sub(1)?).copied()
    }

    /// Zero-based column index in a risk matrix.
    pub(crate) fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::V => "V",
            Self::VI => "VI",
        }
    }
}

impl fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeverityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| format!("unknown severity class `{s}` (expected I..VI)"))
    }
}

/// Occupational exposure to vulnerable persons (medical or care work).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationalExposure {
    VeryHigh,
    High,
    Moderate,
    Low,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedicalCondition {
    DementiaOrMentalHandicap,
    Severe,
    Moderate,
    #[default]
    None,
}

/// The individual preferences that determine the severity class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonProfile {
    pub age: u32,
    #[serde(default)]
    pub care_home_resident: bool,
    #[serde(default)]
    pub occupational_exposure: OccupationalExposure,
    #[serde(default)]
    pub medical_condition: MedicalCondition,
    #[serde(default)]
    pub system_relevant_job: bool,
    #[serde(default)]
    pub teacher: bool,
}

impl PersonProfile {
    pub fn aged(age: u32) -> Self {
        Self {
            age,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.age > MAX_AGE {
            return Err(ProfileError::AgeOutOfRange(self.age));
        }
        Ok(())
    }
}

/// Returns the most severe class whose rule matches the profile.
pub fn classify_severity(profile: &PersonProfile) -> Result<SeverityClass, ProfileError> {
    use MedicalCondition as M;
    use OccupationalExposure as X;

    profile.validate()?;
    let p = profile;
    let class = if p.age > 80 || p.care_home_resident || p.occupational_exposure == X::VeryHigh {
        SeverityClass::I
    } else if p.age > 75
        || p.medical_condition == M::DementiaOrMentalHandicap
        || p.occupational_exposure == X::High
    {
        SeverityClass::II
    } else if p.age > 70 || p.medical_condition == M::Severe || p.occupational_exposure == X::Moderate {
        SeverityClass::III
    } else if p.age > 65
        || p.medical_condition == M::Moderate
        || p.occupational_exposure == X::Low
        || p.teacher
    {
        SeverityClass::IV
    } else if p.age > 60 || p.system_relevant_job {
        SeverityClass::V
    } else {
        SeverityClass::VI
    };
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXPOSURES: [OccupationalExposure; 5] = [
        OccupationalExposure::VeryHigh,
        OccupationalExposure::High,
        OccupationalExposure::Moderate,
        OccupationalExposure::Low,
        OccupationalExposure::None,
    ];
    const CONDITIONS: [MedicalCondition; 4] = [
        MedicalCondition::DementiaOrMentalHandicap,
        MedicalCondition::Severe,
        MedicalCondition::Moderate,
        MedicalCondition::None,
    ];

    /// Evaluates every rule independently and keeps the minimum ordinal.
    fn brute_force(p: &PersonProfile) -> SeverityClass {
        let rules: [(SeverityClass, bool); 6] = [
            (
                SeverityClass::I,
                p.age > 80 || p.care_home_resident || p.occupational_exposure == OccupationalExposure::VeryHigh,
            ),
            (
                SeverityClass::II,
                p.age > 75
                    || p.medical_condition == MedicalCondition::DementiaOrMentalHandicap
                    || p.occupational_exposure == OccupationalExposure::High,
            ),
            (
                SeverityClass::III,
                p.age > 70
                    || p.medical_condition == MedicalCondition::Severe
                    || p.occupational_exposure == OccupationalExposure::Moderate,
            ),
            (
                SeverityClass::IV,
                p.age > 65
                    || p.medical_condition == MedicalCondition::Moderate
                    || p.occupational_exposure == OccupationalExposure::Low
                    || p.teacher,
            ),
            (SeverityClass::V, p.age > 60 || p.system_relevant_job),
            (SeverityClass::VI, true),
        ];
        rules
            .iter()
            .filter(|(_, matched)| *matched)
            .map(|(class, _)| *class)
            .min()
            .unwrap()
    }

    #[test]
    fn worked_example_profiles() {
        assert_eq!(classify_severity(&PersonProfile::aged(82)).unwrap(), SeverityClass::I);
        assert_eq!(classify_severity(&PersonProfile::aged(55)).unwrap(), SeverityClass::VI);
        let nurse = PersonProfile {
            age: 55,
            occupational_exposure: OccupationalExposure::VeryHigh,
            ..Default::default()
        };
        assert_eq!(classify_severity(&nurse).unwrap(), SeverityClass::I);
        let teacher = PersonProfile {
            age: 40,
            teacher: true,
            ..Default::default()
        };
        assert_eq!(classify_severity(&teacher).unwrap(), SeverityClass::IV);
    }

    #[test]
    fn age_thresholds_are_strict() {
        let cases = [
            (80, SeverityClass::II),
            (81, SeverityClass::I),
            (75, SeverityClass::III),
            (76, SeverityClass::II),
            (70, SeverityClass::IV),
            (65, SeverityClass::V),
            (60, SeverityClass::VI),
            (61, SeverityClass::V),
        ];
        for (age, expected) in cases {
            assert_eq!(classify_severity(&PersonProfile::aged(age)).unwrap(), expected, "age {age}");
        }
    }

    #[test]
    fn rejects_implausible_age() {
        assert_eq!(
            classify_severity(&PersonProfile::aged(151)),
            Err(ProfileError::AgeOutOfRange(151))
        );
        assert!(classify_severity(&PersonProfile::aged(150)).is_ok());
    }

    #[test]
    fn exhaustive_grid_matches_brute_force() {
        let ages = [0, 30, 60, 61, 65, 66, 70, 71, 75, 76, 80, 81, 150];
        let mut checked = 0;
        for age in ages {
            for exposure in EXPOSURES {
                for condition in CONDITIONS {
                    for flags in 0u8..8 {
                        let p = PersonProfile {
                            age,
                            care_home_resident: flags & 1 != 0,
                            occupational_exposure: exposure,
                            medical_condition: condition,
                            system_relevant_job: flags & 2 != 0,
                            teacher: flags & 4 != 0,
                        };
                        assert_eq!(classify_severity(&p).unwrap(), brute_force(&p), "{p:?}");
                        checked += 1;
                    }
                }
            }
        }
        assert_eq!(checked, 13 * 5 * 4 * 8);
    }

    #[test]
    fn ordinal_round_trip_and_parse() {
        for class in SeverityClass::ALL {
            assert_eq!(SeverityClass::from_ordinal(class.ordinal()), Some(class));
            assert_eq!(class.as_str().parse::<SeverityClass>(), Ok(class));
        }
        assert_eq!(SeverityClass::from_ordinal(0), None);
        assert_eq!(SeverityClass::from_ordinal(7), None);
        assert!(SeverityClass::I < SeverityClass::VI);
    }

    #[test]
    fn profile_document_defaults() {
        let p: PersonProfile = serde_json::from_str(r#"{"age": 55}"#).unwrap();
        assert_eq!(p, PersonProfile::aged(55));
        let err = serde_json::from_str::<PersonProfile>(r#"{"age": 55, "vaccinated": true}"#);
        assert!(err.is_err());
    }
}
