//! Test oracles that are independent of the engine's code paths.
//!
//! Also compiled into the CLI crate's acceptance suite via `#[path]`.

#![allow(dead_code)]

pub mod strategies;

use riskgate_core::{CalibrationPoint, Expectation, RiskClass, SeverityClass};

/// Side of the reduced grid used for exhaustive calibration checks.
pub const GRID: usize = 4;

/// Severity column `i` of the reduced grid (0 is the most severe).
pub fn grid_severity(i: usize) -> SeverityClass {
    SeverityClass::ALL[i]
}

/// Frequency row `j` of the reduced grid.
pub fn grid_f(j: usize) -> i32 {
    5 + j as i32
}

/// Expectation kinds probed on each grid cell, with their admitted levels.
pub const KINDS: [(Expectation, u8, u8); 4] = [
    (Expectation::Acceptable, 0, 0),
    (Expectation::AtMost(RiskClass::Yellow), 0, 1),
    (Expectation::AtMost(RiskClass::Orange), 0, 2),
    (Expectation::Forbidden, 3, 3),
];

/// Every (cell, expectation) point on the reduced grid; index = (i*GRID + j)*4 + kind.
pub fn grid_points() -> Vec<CalibrationPoint> {
    let mut points = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            for (expectation, _, _) in KINDS {
                points.push(CalibrationPoint::new(grid_severity(i), grid_f(j), expectation, ""));
            }
        }
    }
    points
}

/// All 4x4 class grids (`m[severity][f]`, levels 0..=3) that never decrease
/// toward higher F or toward more severe classes, found by exhaustive
/// backtracking.
pub fn monotone_grids() -> Vec<[[u8; GRID]; GRID]> {
    fn fill(m: &mut [[u8; GRID]; GRID], pos: usize, out: &mut Vec<[[u8; GRID]; GRID]>) {
        if pos == GRID * GRID {
            out.push(*m);
            return;
        }
        // Fill from the least severe column upward, low F first.
        let i = GRID - 1 - pos / GRID;
        let j = pos % GRID;
        let mut lo = 0;
        if j > 0 {
            lo = lo.max(m[i][j - 1]);
        }
        if i + 1 < GRID {
            lo = lo.max(m[i + 1][j]);
        }
        for level in lo..=3 {
            m[i][j] = level;
            fill(m, pos + 1, out);
        }
    }
    let mut out = Vec::new();
    fill(&mut [[0; GRID]; GRID], 0, &mut out);
    out
}

/// Bit `k` set when grid point `k` (see [`grid_points`]) holds in `m`.
pub fn satisfied_mask(m: &[[u8; GRID]; GRID]) -> u64 {
    let mut mask = 0u64;
    for (i, column) in m.iter().enumerate() {
        for (j, level) in column.iter().enumerate() {
            for (kind, (_, lo, hi)) in KINDS.iter().enumerate() {
                if (lo..=hi).contains(&level) {
                    mask |= 1 << ((i * GRID + j) * KINDS.len() + kind);
                }
            }
        }
    }
    mask
}

/// Whether some monotone grid satisfies every point in `set`.
pub fn exists_monotone(masks: &[u64], set: u64) -> bool {
    masks.iter().any(|m| m & set == set)
}

/// True iff class levels never decrease along F and toward more severe columns.
pub fn is_monotone(cells: &[[RiskClass; 6]; 13]) -> bool {
    for row in 0..13 {
        for col in 0..6 {
            if row + 1 < 13 && cells[row + 1][col] < cells[row][col] {
                return false;
            }
            if col + 1 < 6 && cells[row][col + 1] > cells[row][col] {
                return false;
            }
        }
    }
    true
}

/// Independent transcription of the published matrix: rows F=6..=15, blank
/// cells shown as `.`. Only explicitly colored cells are compared.
pub const PUBLISHED_MATRIX: [(i32, [&str; 6]); 10] = [
    (6, ["Green", ".", ".", ".", ".", "."]),
    (7, ["Yellow", "Green", "Green", ".", ".", "."]),
    (8, ["Orange", "Yellow", "Yellow", ".", ".", "."]),
    (9, ["Red", "Orange", "Orange", "Green", "Green", "."]),
    (10, ["Red", "Red", "Red", "Yellow", "Yellow", "."]),
    (11, ["Red", "Red", "Red", "Orange", "Orange", "Green"]),
    (12, ["Red", "Red", "Red", "Red", "Red", "Yellow"]),
    (13, ["Red", "Red", "Red", "Red", "Red", "Orange"]),
    (14, ["Red", "Red", "Red", "Red", "Red", "Red"]),
    (15, ["Red", "Red", "Red", "Red", "Red", "Red"]),
];
