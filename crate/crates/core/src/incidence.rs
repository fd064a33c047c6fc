//! Weekly incidence data: ingestion and resolution to the `W` score.
//!
//! Local files are CSV with columns `region,date,weekly_incidence` (the
//! header line is optional) or a JSON array of objects with the same keys.
//! Remote sources are any URL returning that JSON array. Region keys are
//! matched case-insensitively after trimming.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ScoreError;
use crate::scoring::score_w;

/// Records older than this many days before the requested date are stale.
pub const STALE_AFTER_DAYS: i64 = 14;

const CSV_HEADER: [&str; 3] = ["region", "date", "weekly_incidence"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IncidenceError {
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    /// The remote endpoint could not be reached or answered with an error status.
    #[error("transport error fetching {url}: {message}")]
    Transport { url: String, message: String },

    #[error("invalid incidence document: {0}")]
    Document(String),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("no incidence for `{region}` on or before {date}")]
    NoRecordBefore { region: String, date: NaiveDate },

    #[error(transparent)]
    Score(#[from] ScoreError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidenceRecord {
    pub region: String,
    pub date: NaiveDate,
    pub weekly_incidence: f64,
}

fn region_key(region: &str) -> String {
    region.trim().to_lowercase()
}

/// Immutable table keyed by region, then date.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IncidenceTable {
    regions: BTreeMap<String, BTreeMap<NaiveDate, f64>>,
}

/// A freshly loaded table together with non-fatal findings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadedIncidence {
    pub table: IncidenceTable,
    pub warnings: Vec<String>,
}

/// The record chosen for a region and date.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedIncidence {
    pub region: String,
    pub requested_date: NaiveDate,
    pub record_date: NaiveDate,
    pub weekly_incidence: f64,
    pub w: u8,
    pub stale: bool,
}

impl IncidenceTable {
    fn build<I>(rows: I) -> Result<LoadedIncidence, IncidenceError>
    where
        I: IntoIterator<Item = (usize, IncidenceRecord)>,
    {
        let mut loaded = LoadedIncidence::default();
        for (row, record) in rows {
            if !(record.weekly_incidence.is_finite() && record.weekly_incidence >= 0.0) {
                return Err(IncidenceError::Row {
                    row,
                    message: format!("weekly_incidence must be a non-negative number, got {}", record.weekly_incidence),
                });
            }
            let key = region_key(&record.region);
            if key.is_empty() {
                return Err(IncidenceError::Row { row, message: "empty region".into() });
            }
            let dates = loaded.table.regions.entry(key).or_default();
            if let Some(previous) = dates.insert(record.date, record.weekly_incidence) {
                loaded.warnings.push(format!(
                    "row {row}: duplicate {} {}; replacing {previous} with {}",
                    record.region.trim(),
                    record.date,
                    record.weekly_incidence
                ));
            }
        }
        Ok(loaded)
    }

    /// Parses CSV text. Rows are numbered from 1 and include the header line.
    pub fn from_csv(text: &str) -> Result<LoadedIncidence, IncidenceError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (idx, result) in reader.records().enumerate() {
            let fallback_row = idx + 1;
            let record = result.map_err(|e| IncidenceError::Row {
                row: e.position().map_or(fallback_row, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let row = record.position().map_or(fallback_row, |p| p.line() as usize);
            if idx == 0 && record.iter().eq(CSV_HEADER) {
                continue;
            }
            if record.len() != 3 {
                return Err(IncidenceError::Row {
                    row,
                    message: format!("expected 3 fields (region,date,weekly_incidence), found {}", record.len()),
                });
            }
            let date = record[1]
                .parse::<NaiveDate>()
                .map_err(|e| IncidenceError::Row { row, message: format!("invalid date `{}`: {e}", &record[1]) })?;
            let weekly_incidence = record[2].parse::<f64>().map_err(|_| IncidenceError::Row {
                row,
                message: format!("invalid weekly_incidence `{}`", &record[2]),
            })?;
            rows.push((
                row,
                IncidenceRecord {
                    region: record[0].to_string(),
                    date,
                    weekly_incidence,
                },
            ));
        }
        Self::build(rows)
    }

    /// Parses a JSON array of records. Rows are the 1-based array positions.
    pub fn from_json(text: &str) -> Result<LoadedIncidence, IncidenceError> {
        let records: Vec<IncidenceRecord> =
            serde_json::from_str(text).map_err(|e| IncidenceError::Document(e.to_string()))?;
        Self::build(records.into_iter().enumerate().map(|(i, r)| (i + 1, r)))
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.regions.values().map(BTreeMap::len).sum()
    }

    pub fn regions(&self) -> impl Iterator<Item = &str> {
        self.regions.keys().map(String::as_str)
    }

    pub fn records(&self) -> impl Iterator<Item = IncidenceRecord> + '_ {
        self.regions.iter().flat_map(|(region, dates)| {
            dates.iter().map(move |(date, incidence)| IncidenceRecord {
                region: region.clone(),
                date: *date,
                weekly_incidence: *incidence,
            })
        })
    }

    /// Latest record on or before `date` for `region`, scored as `W`.
    pub fn resolve(&self, region: &str, date: NaiveDate) -> Result<ResolvedIncidence, IncidenceError> {
        let key = region_key(region);
        let dates = self
            .regions
            .get(&key)
            .ok_or_else(|| IncidenceError::UnknownRegion(region.to_string()))?;
        let (record_date, incidence) = dates
            .range(..=date)
            .next_back()
            .ok_or_else(|| IncidenceError::NoRecordBefore { region: region.to_string(), date })?;
        Ok(ResolvedIncidence {
            region: key,
            requested_date: date,
            record_date: *record_date,
            weekly_incidence: *incidence,
            w: score_w(*incidence)?,
            stale: (date - *record_date).num_days() > STALE_AFTER_DAYS,
        })
    }
}

/// `W` score for `region` on `date`.
pub fn resolve_w(table: &IncidenceTable, region: &str, date: NaiveDate) -> Result<u8, IncidenceError> {
    table.resolve(region, date).map(|r| r.w)
}

/// Where incidence data comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncidenceSource {
    File(PathBuf),
    /// A URL returning the JSON array; the last good response is kept in `cache`.
    Remote { url: String, cache: Option<PathBuf> },
}

impl IncidenceSource {
    /// `http://` and `https://` strings are remote, anything else a path.
    pub fn parse(source: &str, cache: Option<PathBuf>) -> Self {
        if source.starts_with("http://") || source.starts_with("https://") {
            Self::Remote {
                url: source.to_string(),
                cache,
            }
        } else {
            Self::File(PathBuf::from(source))
        }
    }
}

fn read_file(path: &Path) -> Result<String, IncidenceError> {
    fs::read_to_string(path).map_err(|e| IncidenceError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_file(path: &Path) -> Result<LoadedIncidence, IncidenceError> {
    let text = read_file(path)?;
    if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("json")) {
        IncidenceTable::from_json(&text)
    } else {
        IncidenceTable::from_csv(&text)
    }
}

fn fetch(url: &str) -> Result<String, IncidenceError> {
    let transport = |e: ureq::Error| IncidenceError::Transport {
        url: url.to_string(),
        message: e.to_string(),
    };
    let mut response = ureq::get(url).call().map_err(transport)?;
    response.body_mut().read_to_string().map_err(transport)
}

/// Loads and validates a table from a file or remote endpoint.
///
/// A remote fetch that fails in transport falls back to the cache file when
/// one exists, with a warning. A successful fetch that parses refreshes the
/// cache.
pub fn load_incidence(source: &IncidenceSource) -> Result<LoadedIncidence, IncidenceError> {
    match source {
        IncidenceSource::File(path) => load_file(path),
        IncidenceSource::Remote { url, cache } => match fetch(url) {
            Ok(body) => {
                let mut loaded = IncidenceTable::from_json(&body)?;
                if let Some(cache) = cache {
                    if let Err(e) = fs::write(cache, &body) {
                        loaded.warnings.push(format!("could not write cache {}: {e}", cache.display()));
                    }
                }
                Ok(loaded)
            }
            Err(transport) => match cache {
                Some(cache) if cache.exists() => {
                    let mut loaded = IncidenceTable::from_json(&read_file(cache)?)?;
                    loaded
                        .warnings
                        .push(format!("{transport}; using cached copy {}", cache.display()));
                    Ok(loaded)
                }
                _ => Err(transport),
            },
        },
    }
}
