//! What-if search over single and paired scenario changes.
//!
//! Barrier levers (ventilation, distance, mask) may move to any stronger
//! option. Behavior levers (duration, frequency, persons) move one band down,
//! to the band's representative value. Pairs combine two different levers.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::assess::{score_scenario, AssessError, Assessor, ScoreOutcome};
use crate::matrix::RiskMatrix;
use crate::risk::RiskClass;
use crate::scenario::RawScenario;
use crate::scoring::{score_m, score_v, ComponentScores, Mask, ScoredScenario, Ventilation};
use crate::severity::{classify_severity, PersonProfile, SeverityClass};
use crate::tables::{self, BandTable, DEFAULT_MAX_PERSONS};

/// Scenario fields a mitigation may change, in tie-break priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lever {
    Ventilation,
    Distance,
    Mask,
    Duration,
    Frequency,
    Persons,
}

impl Lever {
    pub fn is_barrier(self) -> bool {
        matches!(self, Self::Ventilation | Self::Distance | Self::Mask)
    }

    fn table(self) -> &'static BandTable {
        match self {
            Self::Ventilation => &tables::VENTILATION,
            Self::Distance => &tables::DISTANCE,
            Self::Mask => &tables::MASK,
            Self::Duration => &tables::EXPOSURE_TIME,
            Self::Frequency => &tables::CUMULATIVE_EXPOSURE,
            Self::Persons => &tables::PERSONS,
        }
    }
}

/// A move of one scenario field into another score band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub field: Lever,
    pub from_score: u8,
    pub to_score: u8,
    /// Band label of the target, e.g. "Medical mask e. g. FFP2".
    pub band: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Ventilation(Ventilation),
    Mask(Mask),
    Distance(f64),
    Duration(f64),
    Frequency(f64),
    Persons(u32),
}

#[derive(Debug, Clone, PartialEq)]
struct Move {
    change: Change,
    target: Target,
}

impl Move {
    fn new(field: Lever, from_score: u8, to_score: u8, target: Target) -> Self {
        let band = field
            .table()
            .band(to_score)
            .map(|b| b.label.to_string())
            .unwrap_or_default();
        Self {
            change: Change {
                field,
                from_score,
                to_score,
                band,
            },
            target,
        }
    }

    fn apply(&self, scenario: &mut RawScenario) {
        match self.target {
            Target::Ventilation(v) => scenario.ventilation = v,
            Target::Mask(m) => scenario.mask = m,
            Target::Distance(d) => scenario.distance_meters = d,
            Target::Duration(t) => scenario.duration_minutes = t,
            Target::Frequency(c) => scenario.exposures_per_week = c,
            Target::Persons(n) => scenario.persons = n,
        }
    }

    fn apply_score(&self, scores: &mut ComponentScores) {
        let to = self.change.to_score;
        match self.change.field {
            Lever::Ventilation => scores.v = to,
            Lever::Distance => scores.d = to,
            Lever::Mask => scores.m = to,
            Lever::Duration => scores.t = to,
            Lever::Frequency => scores.c = to,
            Lever::Persons => scores.n = to,
        }
    }
}

/// A ranked suggestion: one or two changes and the risk they lead to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mitigation {
    pub changes: Vec<Change>,
    pub new_f: i32,
    pub new_risk: RiskClass,
    /// The scenario with the changes applied.
    pub scenario: RawScenario,
}

fn representative(table: &BandTable, score: u8) -> Option<f64> {
    table.band(score).and_then(|b| b.representative)
}

fn candidate_moves(scores: &ComponentScores, refused: bool, max_persons: u32) -> Vec<Move> {
    let mut moves = Vec::new();
    for v in Ventilation::ALL {
        if score_v(v) > scores.v {
            moves.push(Move::new(Lever::Ventilation, scores.v, score_v(v), Target::Ventilation(v)));
        }
    }
    for band in tables::DISTANCE.bands.iter().filter(|b| b.score > scores.d) {
        if let Some(meters) = band.representative {
            moves.push(Move::new(Lever::Distance, scores.d, band.score, Target::Distance(meters)));
        }
    }
    for m in Mask::ALL {
        if score_m(m) > scores.m {
            moves.push(Move::new(Lever::Mask, scores.m, score_m(m), Target::Mask(m)));
        }
    }
    if scores.t > tables::EXPOSURE_TIME.min_score() {
        if let Some(minutes) = representative(&tables::EXPOSURE_TIME, scores.t - 1) {
            moves.push(Move::new(Lever::Duration, scores.t, scores.t - 1, Target::Duration(minutes)));
        }
    }
    if scores.c > tables::CUMULATIVE_EXPOSURE.min_score() {
        if let Some(per_week) = representative(&tables::CUMULATIVE_EXPOSURE, scores.c - 1) {
            moves.push(Move::new(Lever::Frequency, scores.c, scores.c - 1, Target::Frequency(per_week)));
        }
    }
    if refused {
        // Bring the crowd down to the limit; scores.n already holds the limit's band.
        moves.push(Move::new(Lever::Persons, scores.n, scores.n, Target::Persons(max_persons)));
    } else if scores.n > tables::PERSONS.min_score() {
        if let Some(persons) = representative(&tables::PERSONS, scores.n - 1) {
            // Person representatives are whole numbers.
            moves.push(Move::new(Lever::Persons, scores.n, scores.n - 1, Target::Persons(persons as u32)));
        }
    }
    moves
}

fn rank(a: &Mitigation, b: &Mitigation) -> Ordering {
    let key = |m: &Mitigation| -> Vec<(Lever, u8)> {
        let mut k: Vec<(Lever, u8)> = m.changes.iter().map(|c| (c.field, c.to_score)).collect();
        k.sort();
        k
    };
    a.new_risk
        .cmp(&b.new_risk)
        .then(a.new_f.cmp(&b.new_f))
        .then_with(|| key(a).cmp(&key(b)))
}

impl Assessor {
    /// Ranked single and paired changes that lower the frequency score.
    ///
    /// Order: resulting risk class, then resulting `F`, then lever priority
    /// (ventilation, distance, mask, duration, frequency, persons). A refused
    /// scenario only gets suggestions that bring the person count within the
    /// limit; a scenario without exposure gets none.
    pub fn what_if(&self, scenario: &RawScenario, profile: &PersonProfile) -> Result<Vec<Mitigation>, AssessError> {
        let severity = classify_severity(profile)?;
        self.what_if_for(scenario, severity)
    }

    pub fn what_if_for(&self, scenario: &RawScenario, severity: SeverityClass) -> Result<Vec<Mitigation>, AssessError> {
        let (scores, refused) = match score_scenario(scenario, self.max_persons())? {
            ScoreOutcome::NoExposure => return Ok(Vec::new()),
            ScoreOutcome::Scored(scored) => (scored.components(), false),
            ScoreOutcome::Refused { .. } => {
                let mut capped = RawScenario {
                    persons: self.max_persons(),
                    ..scenario.clone()
                };
                capped.label.clear();
                match score_scenario(&capped, self.max_persons())? {
                    ScoreOutcome::Scored(scored) => (scored.components(), true),
                    _ => return Ok(Vec::new()),
                }
            }
        };
        let moves = candidate_moves(&scores, refused, self.max_persons());

        let mut combos: Vec<Vec<&Move>> = Vec::new();
        for (i, a) in moves.iter().enumerate() {
            combos.push(vec![a]);
            for b in &moves[i + 1..] {
                if a.change.field != b.change.field {
                    combos.push(vec![a, b]);
                }
            }
        }
        if refused {
            combos.retain(|combo| combo.iter().any(|m| m.change.field == Lever::Persons));
        }

        let mut mitigations = Vec::with_capacity(combos.len());
        for combo in combos {
            let mut new_scores = scores;
            let mut mutated = scenario.clone();
            for m in &combo {
                m.apply_score(&mut new_scores);
                m.apply(&mut mutated);
            }
            let new_f = ScoredScenario::new(new_scores)?.f;
            mitigations.push(Mitigation {
                changes: combo.iter().map(|m| m.change.clone()).collect(),
                new_f,
                new_risk: self.classify(severity, new_f),
                scenario: mutated,
            });
        }
        mitigations.sort_by(rank);
        Ok(mitigations)
    }
}

/// One-shot what-if with the default person limit.
pub fn what_if(scenario: &RawScenario, profile: &PersonProfile, matrix: &RiskMatrix) -> Result<Vec<Mitigation>, AssessError> {
    Assessor::new(matrix.clone(), DEFAULT_MAX_PERSONS)?.what_if(scenario, profile)
}
