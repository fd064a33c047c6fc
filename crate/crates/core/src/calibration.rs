//! Calibration points: externally asserted judgements about single matrix
//! cells, checked against a matrix or against each other.
//!
//! Points file format is JSON Lines:
//!
//! ```text
//! {"severity":"I","f":6,"expectation":"acceptable","note":"..."}
//! {"severity":"IV","f":3,"expectation":"forbidden","note":"..."}
//! {"severity":"V","f":10,"expectation":"at_most:yellow","note":"..."}
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{clamp_f, lookup_risk, validate_matrix, Cell, Finding, MatrixError, RiskMatrix, Rule, ValidationReport};
use crate::risk::RiskClass;
use crate::severity::SeverityClass;

/// What a calibration point demands of its cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Expectation {
    /// The cell must be Green.
    Acceptable,
    /// The cell must be no worse than the bound.
    AtMost(RiskClass),
    /// The cell must be Red.
    Forbidden,
}

impl Expectation {
    /// Inclusive range of classes that satisfy the expectation.
    pub fn bounds(self) -> (RiskClass, RiskClass) {
        match self {
            Self::Acceptable => (RiskClass::Green, RiskClass::Green),
            Self::AtMost(bound) => (RiskClass::Green, bound),
            Self::Forbidden => (RiskClass::Red, RiskClass::Red),
        }
    }

    pub fn admits(self, class: RiskClass) -> bool {
        let (lo, hi) = self.bounds();
        (lo..=hi).contains(&class)
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Acceptable => f.write_str("acceptable"),
            Self::AtMost(bound) => write!(f, "at_most:{bound}"),
            Self::Forbidden => f.write_str("forbidden"),
        }
    }
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "acceptable" => Ok(Self::Acceptable),
            "forbidden" => Ok(Self::Forbidden),
            other => match other.strip_prefix("at_most:") {
                Some(bound) => bound.parse().map(Self::AtMost),
                None => Err(format!(
                    "unknown expectation `{other}` (expected acceptable, forbidden or at_most:<class>)"
                )),
            },
        }
    }
}

impl TryFrom<String> for Expectation {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Expectation> for String {
    fn from(value: Expectation) -> Self {
        value.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationPoint {
    pub severity: SeverityClass,
    pub f: i32,
    pub expectation: Expectation,
    #[serde(default)]
    pub note: String,
}

impl CalibrationPoint {
    pub fn new(severity: SeverityClass, f: i32, expectation: Expectation, note: &str) -> Self {
        Self {
            severity,
            f,
            expectation,
            note: note.to_string(),
        }
    }

    /// The matrix cell the point constrains, after clamping `f`.
    pub fn cell(&self) -> Cell {
        Cell {
            f: clamp_f(self.f),
            severity: self.severity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct PointsParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a JSON Lines points file; blank lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<CalibrationPoint>, PointsParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(idx, line)| {
            serde_json::from_str(line).map_err(|e| PointsParseError {
                line: idx + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn points_to_jsonl(points: &[CalibrationPoint]) -> String {
    points
        .iter()
        .map(|p| serde_json::to_string(p).expect("points serialize") + "\n")
        .collect()
}

/// Checks each point against its cell. The matrix itself must be valid.
pub fn check_points(matrix: &RiskMatrix, points: &[CalibrationPoint]) -> Result<ValidationReport, MatrixError> {
    let validation = validate_matrix(matrix);
    if !validation.is_valid() {
        return Err(MatrixError::Invalid(validation));
    }
    let mut report = ValidationReport::default();
    for point in points {
        let cell = point.cell();
        let actual = lookup_risk(matrix, cell.severity, cell.f);
        if !point.expectation.admits(actual) {
            report.errors.push(Finding {
                rule: Rule::CalibrationPoint,
                cell,
                neighbor: None,
                message: format!(
                    "expected {}, matrix has {actual}{}",
                    point.expectation,
                    if point.note.is_empty() { String::new() } else { format!(" ({})", point.note) }
                ),
            });
        }
    }
    Ok(report)
}

/// A pair of points that no monotone matrix can satisfy together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    /// Index of the point whose upper bound is violated.
    pub bounded: usize,
    /// Index of the point whose lower bound exceeds it.
    pub demanding: usize,
    pub message: String,
}

impl Conflict {
    /// The pair as an ordered `(lower index, higher index)`.
    pub fn pair(&self) -> (usize, usize) {
        (self.bounded.min(self.demanding), self.bounded.max(self.demanding))
    }
}

/// `a` lies below-or-at `b` in the monotone order: no more severe and no higher `F`.
fn dominated_by(a: Cell, b: Cell) -> bool {
    a.severity >= b.severity && a.f <= b.f
}

/// Finds every pair of points that cannot both hold in a matrix that is
/// monotone along both axes.
///
/// A monotone matrix gives a cell at least the class of every cell it
/// dominates, so a point demanding class `>= b` somewhere below a point that
/// allows at most `a < b` is unsatisfiable. Pairwise checks are complete: if no
/// such pair exists, assigning each cell the largest lower bound among the
/// points it dominates yields a satisfying matrix.
pub fn detect_conflicts(points: &[CalibrationPoint]) -> Vec<Conflict> {
    let mut conflicts = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            // Try both orientations; at most one can fire unless the cells coincide.
            for (upper_idx, lower_idx) in [(i, j), (j, i)] {
                let (upper, lower) = (&points[upper_idx], &points[lower_idx]);
                let (_, hi) = upper.expectation.bounds();
                let (lo, _) = lower.expectation.bounds();
                if dominated_by(lower.cell(), upper.cell()) && lo > hi {
                    conflicts.push(Conflict {
                        bounded: upper_idx,
                        demanding: lower_idx,
                        message: format!(
                            "{} demands {} but {} allows at most {hi} and is at least as risky",
                            lower.cell(),
                            lower.expectation,
                            upper.cell(),
                        ),
                    });
                    break;
                }
            }
        }
    }
    conflicts
}

/// Conflicts rendered as report findings.
pub fn conflict_findings(points: &[CalibrationPoint], conflicts: &[Conflict]) -> Vec<Finding> {
    conflicts
        .iter()
        .map(|c| {
            let bounded = &points[c.bounded];
            let demanding = &points[c.demanding];
            let mut message = c.message.clone();
            for note in [&demanding.note, &bounded.note] {
                if !note.is_empty() {
                    message.push_str(&format!("; {note}"));
                }
            }
            Finding {
                rule: Rule::CalibrationConflict,
                cell: demanding.cell(),
                neighbor: Some(bounded.cell()),
                message,
            }
        })
        .collect()
}

/// The three calibration points discussed for the proposed matrix.
pub fn reference_points() -> Vec<CalibrationPoint> {
    vec![
        CalibrationPoint::new(
            SeverityClass::I,
            6,
            Expectation::Acceptable,
            "single short encounter at low incidence: N=1, C=1, T=3, W<=2",
        ),
        CalibrationPoint::new(
            SeverityClass::VI,
            11,
            Expectation::Acceptable,
            "household meets one person at will at moderate incidence: N=1, C=2, T=5, W=3",
        ),
        CalibrationPoint::new(
            SeverityClass::IV,
            3,
            Expectation::Forbidden,
            "nursing home or hospital visit ban: N=1, C=0, T=3, W=3 with M=2, D=1, V=1",
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::default_matrix;
    use SeverityClass::*;

    #[test]
    fn expectation_strings() {
        for e in [
            Expectation::Acceptable,
            Expectation::Forbidden,
            Expectation::AtMost(RiskClass::Yellow),
        ] {
            assert_eq!(e.to_string().parse::<Expectation>(), Ok(e));
        }
        assert_eq!("at_most:orange".parse(), Ok(Expectation::AtMost(RiskClass::Orange)));
        assert!("at_most:".parse::<Expectation>().is_err());
        assert!("maybe".parse::<Expectation>().is_err());
    }

    #[test]
    fn reference_points_against_default_matrix() {
        let points = reference_points();
        let report = check_points(&default_matrix(), &points).unwrap();
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].cell, Cell { f: 3, severity: IV });
        assert!(report.errors[0].message.contains("nursing home"));
    }

    #[test]
    fn check_points_rejects_invalid_matrix() {
        let bad = default_matrix().with_cell(9, I, RiskClass::Green).unwrap();
        assert!(matches!(
            check_points(&bad, &reference_points()),
            Err(MatrixError::Invalid(_))
        ));
    }

    #[test]
    fn at_most_bound() {
        let m = default_matrix();
        let ok = CalibrationPoint::new(IV, 10, Expectation::AtMost(RiskClass::Yellow), "");
        let bad = CalibrationPoint::new(IV, 11, Expectation::AtMost(RiskClass::Yellow), "");
        let report = check_points(&m, &[ok, bad]).unwrap();
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].cell.f, 11);
    }

    #[test]
    fn clamped_points() {
        let p = CalibrationPoint::new(I, -2, Expectation::Acceptable, "");
        assert_eq!(p.cell().f, 3);
        assert!(check_points(&default_matrix(), &[p]).unwrap().is_valid());
    }

    #[test]
    fn nursing_home_conflict() {
        let points = vec![
            CalibrationPoint::new(I, 6, Expectation::Acceptable, ""),
            CalibrationPoint::new(IV, 3, Expectation::Forbidden, ""),
        ];
        let conflicts = detect_conflicts(&points);
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].bounded, 0);
        assert_eq!(conflicts[0].demanding, 1);
    }

    #[test]
    fn reference_points_conflict_once() {
        let conflicts = detect_conflicts(&reference_points());
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].pair(), (0, 2));
    }

    #[test]
    fn compatible_points() {
        assert!(detect_conflicts(&[]).is_empty());
        let points = vec![
            CalibrationPoint::new(VI, 11, Expectation::Acceptable, ""),
            CalibrationPoint::new(I, 14, Expectation::Forbidden, ""),
        ];
        assert!(detect_conflicts(&points).is_empty());
        assert!(check_points(&default_matrix(), &points).unwrap().is_valid());
    }

    #[test]
    fn same_cell_contradiction() {
        let points = vec![
            CalibrationPoint::new(III, 9, Expectation::Forbidden, ""),
            CalibrationPoint::new(III, 9, Expectation::AtMost(RiskClass::Orange), ""),
        ];
        let conflicts = detect_conflicts(&points);
        assert_eq!(conflicts.len(), 1);
        assert_eq!((conflicts[0].bounded, conflicts[0].demanding), (1, 0));
    }

    #[test]
    fn jsonl_round_trip_and_errors() {
        let points = reference_points();
        let text = points_to_jsonl(&points);
        assert_eq!(parse_points(&text).unwrap(), points);
        assert_eq!(parse_points("\n\n").unwrap(), vec![]);

        let err = parse_points("{\"severity\":\"I\",\"f\":6,\"expectation\":\"acceptable\"}\n{\"severity\":\"VII\",\"f\":1,\"expectation\":\"acceptable\"}").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_points("{\"severity\":\"I\",\"f\":6,\"expectation\":\"fine\"}").unwrap_err();
        assert!(err.message.contains("unknown expectation"));
    }
}
