//! A-priori infection risk assessment for planned everyday activities.
//!
//! An activity is described by a handful of measurable quantities (persons
//! met, local weekly incidence, how often and how long, distance, masks,
//! ventilation). Each maps to a small integer score on a logarithmic scale;
//! the frequency score `F = N + W + C + T - D - M - V` is then classified
//! together with the person's severity class `S` in a risk score matrix.
//!
//! ```
//! use riskgate_core::{default_matrix, Assessor, PersonProfile, RawScenario, RiskClass};
//!
//! let assessor = Assessor::new(default_matrix(), 100).unwrap();
//! let shopping = RawScenario {
//!     persons: 30,
//!     weekly_incidence: 80.0,
//!     exposures_per_week: 3.0,
//!     duration_minutes: 4.0,
//!     ..Default::default()
//! };
//! let verdict = assessor.assess(&shopping, &PersonProfile::aged(55)).unwrap();
//! assert_eq!(verdict.f, Some(10));
//! assert_eq!(verdict.risk, RiskClass::Green);
//! ```

pub mod assess;
pub mod calibration;
pub mod error;
pub mod incidence;
pub mod matrix;
pub mod physics;
pub mod risk;
pub mod scenario;
pub mod scoring;
pub mod severity;
pub mod tables;
pub mod whatif;

pub use assess::{
    assess, assess_schedule, Assessment, AssessError, Assessor, Schedule, ScheduleAssessment, ScheduleEntry,
    JOINT_EFFECT_WARNING, MASK_ADVICE,
};
pub use calibration::{check_points, detect_conflicts, parse_points, CalibrationPoint, Conflict, Expectation};
pub use error::{DomainError, ProfileError, ScoreError};
pub use incidence::{load_incidence, resolve_w, IncidenceError, IncidenceSource, IncidenceTable, ResolvedIncidence};
pub use matrix::{default_matrix, lookup_risk, validate_matrix, MatrixError, RiskMatrix, ValidationReport};
pub use physics::{concentration_ratio, factor_to_score, DecayModel};
pub use risk::RiskClass;
pub use scenario::{parse_scenario, parse_scenario_with, ParseError, RawScenario, ScenarioDocument};
pub use scoring::{
    frequency_score, score_c, score_d, score_m, score_n, score_t, score_v, score_w, ComponentScores, Mask,
    ScoredScenario, Ventilation,
};
pub use severity::{classify_severity, MedicalCondition, OccupationalExposure, PersonProfile, SeverityClass};
pub use tables::DEFAULT_MAX_PERSONS;
pub use whatif::{what_if, Change, Lever, Mitigation};
