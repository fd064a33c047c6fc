//! Risk score matrices: frequency score rows `F = 3..=15` by severity columns
//! `I..=VI`.
//!
//! Text format, one row per `F` value after a fixed header:
//!
//! ```text
//! # name: default
//! # version: 1
//! F I II III IV V VI
//! 3 G G G G G G
//! ...
//! 15 R R R R R R
//! ```
//!
//! Cells are `G`, `Y`, `O` or `R`. Lines starting with `#` are comments;
//! `# name:` and `# version:` comments carry the matrix metadata.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::risk::RiskClass;
use crate::severity::SeverityClass;

pub const MIN_F: i32 = 3;
pub const MAX_F: i32 = 15;
const ROWS: usize = (MAX_F - MIN_F + 1) as usize;
const COLUMNS: usize = SeverityClass::ALL.len();

const HEADER: [&str; 7] = ["F", "I", "II", "III", "IV", "V", "VI"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is incomplete: missing rows {missing:?}")]
    Incomplete { missing: Vec<i32> },

    #[error("F={0} is outside the matrix rows {MIN_F}..={MAX_F}")]
    RowOutOfRange(i32),

    #[error("matrix is invalid: {}", .0.summary())]
    Invalid(ValidationReport),
}

/// A complete classification of every `(F, S)` cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RiskMatrix {
    name: String,
    version: String,
    cells: [[RiskClass; COLUMNS]; ROWS],
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl RiskMatrix {
    /// Builds a matrix from rows ordered `F = 3..=15`, columns `I..=VI`.
    pub fn new(name: &str, version: &str, rows: [[RiskClass; COLUMNS]; ROWS]) -> Self {
        Self {
            name: single_line(name),
            version: single_line(version),
            cells: rows,
        }
    }

    /// Builds a matrix from explicit `(f, s, class)` cells; every cell must be present.
    pub fn from_cells<I>(name: &str, version: &str, cells: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (i32, SeverityClass, RiskClass)>,
    {
        let mut grid = [[None; COLUMNS]; ROWS];
        for (f, s, class) in cells {
            let row = row_index(f).ok_or(MatrixError::RowOutOfRange(f))?;
            grid[row][s.index()] = Some(class);
        }
        let missing: Vec<i32> = (MIN_F..=MAX_F)
            .filter(|&f| grid[row_index(f).unwrap()].iter().any(Option::is_none))
            .collect();
        if !missing.is_empty() {
            return Err(MatrixError::Incomplete { missing });
        }
        Ok(Self::new(name, version, grid.map(|row| row.map(Option::unwrap))))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Cell at an in-range `f`.
    pub fn cell(&self, f: i32, s: SeverityClass) -> Option<RiskClass> {
        row_index(f).map(|row| self.cells[row][s.index()])
    }

    pub fn with_cell(mut self, f: i32, s: SeverityClass, class: RiskClass) -> Result<Self, MatrixError> {
        let row = row_index(f).ok_or(MatrixError::RowOutOfRange(f))?;
        self.cells[row][s.index()] = class;
        Ok(self)
    }

    /// Rows in `F` order.
    pub fn rows(&self) -> impl Iterator<Item = (i32, &[RiskClass; COLUMNS])> {
        (MIN_F..=MAX_F).zip(self.cells.iter())
    }

    /// Serializes to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# name: {}\n", self.name));
        out.push_str(&format!("# version: {}\n", self.version));
        out.push_str(&HEADER.join(" "));
        out.push('\n');
        for (f, row) in self.rows() {
            out.push_str(&f.to_string());
            for class in row {
                out.push(' ');
                out.push(class.code());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the line-oriented text format.
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        let mut name = String::new();
        let mut version = String::new();
        let mut header_seen = false;
        let mut grid = [[None; COLUMNS]; ROWS];

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| MatrixError::Parse { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("name:") {
                    name = v.trim().to_string();
                } else if let Some(v) = comment.strip_prefix("version:") {
                    version = v.trim().to_string();
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if !header_seen {
                if tokens != HEADER {
                    return Err(err(format!("expected header `{}`", HEADER.join(" "))));
                }
                header_seen = true;
                continue;
            }
            if tokens.len() != HEADER.len() {
                return Err(err(format!("expected {} fields, found {}", HEADER.len(), tokens.len())));
            }
            let f: i32 = tokens[0]
                .parse()
                .map_err(|_| err(format!("invalid F value `{}`", tokens[0])))?;
            let row = row_index(f).ok_or_else(|| err(format!("F={f} outside {MIN_F}..={MAX_F}")))?;
            if grid[row][0].is_some() {
                return Err(err(format!("duplicate row F={f}")));
            }
            for (col, token) in tokens[1..].iter().enumerate() {
                let mut chars = token.chars();
                let class = match (chars.next(), chars.next()) {
                    (Some(c), None) => RiskClass::from_code(c),
                    _ => None,
                }
                .ok_or_else(|| err(format!("invalid cell `{token}` (expected G, Y, O or R)")))?;
                grid[row][col] = Some(class);
            }
        }
        if !header_seen {
            return Err(MatrixError::Parse {
                line: text.lines().count().max(1),
                message: "missing header".into(),
            });
        }
        Self::from_cells(
            &name,
            &version,
            (MIN_F..=MAX_F).flat_map(|f| {
                let row = grid[row_index(f).unwrap()];
                SeverityClass::ALL
                    .into_iter()
                    .filter_map(move |s| row[s.index()].map(|class| (f, s, class)))
            }),
        )
    }

    /// Grid view used by JSON clients.
    pub fn to_grid(&self) -> MatrixGrid {
        MatrixGrid {
            name: self.name.clone(),
            version: self.version.clone(),
            columns: SeverityClass::ALL.to_vec(),
            rows: self
                .rows()
                .map(|(f, row)| GridRow { f, cells: row.to_vec() })
                .collect(),
        }
    }
}

fn row_index(f: i32) -> Option<usize> {
    (MIN_F..=MAX_F).contains(&f).then(|| (f - MIN_F) as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixGrid {
    pub name: String,
    pub version: String,
    pub columns: Vec<SeverityClass>,
    pub rows: Vec<GridRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRow {
    pub f: i32,
    pub cells: Vec<RiskClass>,
}

/// The proposed matrix; cells left blank in the published table are Green.
pub fn default_matrix() -> RiskMatrix {
    use RiskClass::{Green as G, Orange as O, Red as R, Yellow as Y};
    RiskMatrix::new(
        "default",
        "1",
        [
            [G, G, G, G, G, G], // 3
            [G, G, G, G, G, G], // 4
            [G, G, G, G, G, G], // 5
            [G, G, G, G, G, G], // 6
            [Y, G, G, G, G, G], // 7
            [O, Y, Y, G, G, G], // 8
            [R, O, O, G, G, G], // 9
            [R, R, R, Y, Y, G], // 10
            [R, R, R, O, O, G], // 11
            [R, R, R, R, R, Y], // 12
            [R, R, R, R, R, O], // 13
            [R, R, R, R, R, R], // 14
            [R, R, R, R, R, R], // 15
        ],
    )
}

/// Clamps `f` into the matrix rows.
pub fn clamp_f(f: i32) -> i32 {
    f.clamp(MIN_F, MAX_F)
}

/// Risk class of `(s, f)`; `f` below 3 or above 15 uses the nearest row.
pub fn lookup_risk(matrix: &RiskMatrix, s: SeverityClass, f: i32) -> RiskClass {
    matrix.cells[row_index(clamp_f(f)).unwrap()][s.index()]
}

/// A matrix cell reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub f: i32,
    pub severity: SeverityClass,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(F={}, S={})", self.f, self.severity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ColumnMonotonicity,
    RowMonotonicity,
    ColumnJump,
    RowJump,
    CalibrationPoint,
    CalibrationConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: Rule,
    pub cell: Cell,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbor: Option<Cell>,
    pub message: String,
}

impl Finding {
    pub fn location(&self) -> String {
        match self.neighbor {
            Some(n) => format!("{} / {}", self.cell, n),
            None => self.cell.to_string(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{:?}] {}", self.location(), self.rule, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn summary(&self) -> String {
        format!("{} error(s), {} warning(s)", self.errors.len(), self.warnings.len())
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }
}

/// Checks monotonicity along both axes and the no-jump rule.
///
/// Columns must not decrease with `F` nor skip a class between adjacent rows.
/// Rows must not increase from `I` toward `VI`; skipped classes along a row are
/// only warnings, since the published matrix contains them.
pub fn validate_matrix(matrix: &RiskMatrix) -> ValidationReport {
    let mut report = ValidationReport::default();
    for s in SeverityClass::ALL {
        for f in MIN_F..MAX_F {
            let (lower, upper) = (lookup_risk(matrix, s, f), lookup_risk(matrix, s, f + 1));
            let cell = Cell { f, severity: s };
            let neighbor = Some(Cell { f: f + 1, severity: s });
            if upper < lower {
                report.errors.push(Finding {
                    rule: Rule::ColumnMonotonicity,
                    cell,
                    neighbor,
                    message: format!("risk drops from {lower} to {upper} as F increases"),
                });
            } else if upper.level() - lower.level() > 1 {
                report.errors.push(Finding {
                    rule: Rule::ColumnJump,
                    cell,
                    neighbor,
                    message: format!("risk jumps from {lower} to {upper} between adjacent F rows"),
                });
            }
        }
    }
    for f in MIN_F..=MAX_F {
        for pair in SeverityClass::ALL.windows(2) {
            let (severe, milder) = (pair[0], pair[1]);
            let (a, b) = (lookup_risk(matrix, severe, f), lookup_risk(matrix, milder, f));
            let cell = Cell { f, severity: severe };
            let neighbor = Some(Cell { f, severity: milder });
            if b > a {
                report.errors.push(Finding {
                    rule: Rule::RowMonotonicity,
                    cell,
                    neighbor,
                    message: format!("risk rises from {a} to {b} toward a less severe class"),
                });
            } else if a.level() - b.level() > 1 {
                report.warnings.push(Finding {
                    rule: Rule::RowJump,
                    cell,
                    neighbor,
                    message: format!("risk jumps from {a} to {b} between adjacent severity classes"),
                });
            }
        }
    }
    report
}
