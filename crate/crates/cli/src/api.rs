//! Request and response bodies plus the engine both front ends call.
//!
//! The CLI and the service go through [`Engine`] so their JSON is identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use riskgate_core::matrix::MatrixGrid;
use riskgate_core::scenario::{from_json_str, IncidenceContext, ResolvedScenario};
use riskgate_core::tables::{BandTable, ALL_TABLES};
use riskgate_core::{
    classify_severity, load_incidence, AssessError, Assessment, Assessor, IncidenceError, IncidenceSource,
    IncidenceTable, MatrixError, Mitigation, ParseError, PersonProfile, ResolvedIncidence, RiskMatrix, Schedule,
    ScheduleAssessment, ScenarioDocument, SeverityClass,
};

use crate::config::AppConfig;

/// Body of `POST /assess` and `POST /whatif`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessRequest {
    pub scenario: ScenarioDocument,
    /// Falls back to the stored profile when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PersonProfile>,
}

/// Body of `POST /schedule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleRequest {
    pub entries: Vec<ScenarioDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PersonProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssessResponse {
    #[serde(flatten)]
    pub assessment: Assessment,
    /// The record used when the scenario named a region.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incidence: Option<ResolvedIncidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIfResponse {
    pub assessment: AssessResponse,
    pub mitigations: Vec<Mitigation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TablesResponse {
    pub max_persons: u32,
    pub tables: Vec<&'static BandTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HealthResponse {
    pub status: &'static str,
    pub matrix: MatrixInfo,
    pub max_persons: u32,
    pub incidence_records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileResponse {
    pub profile: PersonProfile,
    pub severity: SeverityClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReloadResponse {
    pub records: usize,
    pub regions: usize,
    pub warnings: Vec<String>,
}

/// Failures while handling one request.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Invalid(#[from] ParseError),

    #[error("{0}")]
    NotFound(String),

    #[error(transparent)]
    Upstream(IncidenceError),

    #[error("{0}")]
    Internal(String),
}

impl From<AssessError> for EngineError {
    fn from(e: AssessError) -> Self {
        match e {
            AssessError::Profile(p) => ParseError::field("profile.age", p.to_string()).into(),
            AssessError::Entry { index, source } => match EngineError::from(*source) {
                EngineError::Invalid(p) => EngineError::Invalid(p.within(&format!("entries[{index}]"))),
                other => other,
            },
            AssessError::EmptySchedule => ParseError::field("entries", "must not be empty").into(),
            other => EngineError::Internal(other.to_string()),
        }
    }
}

/// Failures while building an [`Engine`] from configuration.
#[derive(Debug, Error)]
pub enum StartupError {
    #[error("{path}: {message}")]
    Read { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Matrix { path: PathBuf, source: MatrixError },

    #[error(transparent)]
    Assessor(#[from] AssessError),

    #[error("incidence: {0}")]
    Incidence(#[from] IncidenceError),

    #[error("profile {path}: {source}")]
    Profile { path: PathBuf, source: ParseError },
}

fn read_lock<T>(lock: &RwLock<T>) -> std::sync::RwLockReadGuard<'_, T> {
    lock.read().unwrap_or_else(|e| e.into_inner())
}

fn write_lock<T>(lock: &RwLock<T>) -> std::sync::RwLockWriteGuard<'_, T> {
    lock.write().unwrap_or_else(|e| e.into_inner())
}

/// Reads a matrix text file.
pub fn load_matrix(path: &Path) -> Result<RiskMatrix, StartupError> {
    let text = fs::read_to_string(path).map_err(|e| StartupError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    RiskMatrix::parse(&text).map_err(|source| StartupError::Matrix {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses and validates a profile document.
pub fn parse_profile(text: &str) -> Result<PersonProfile, ParseError> {
    let profile: PersonProfile = from_json_str(text)?;
    profile
        .validate()
        .map_err(|e| ParseError::field("age", e.to_string()))?;
    Ok(profile)
}

/// Matrix, limits, incidence table and stored profile.
#[derive(Debug)]
pub struct Engine {
    assessor: Assessor,
    incidence_source: Option<IncidenceSource>,
    incidence: RwLock<Arc<IncidenceTable>>,
    profile_path: Option<PathBuf>,
    profile: RwLock<Option<PersonProfile>>,
    today: Option<NaiveDate>,
}

impl Engine {
    pub fn new(assessor: Assessor) -> Self {
        Self {
            assessor,
            incidence_source: None,
            incidence: RwLock::new(Arc::new(IncidenceTable::default())),
            profile_path: None,
            profile: RwLock::new(None),
            today: None,
        }
    }

    /// Loads the matrix, incidence table and stored profile named in `config`.
    ///
    /// Returns the engine and any incidence loading warnings.
    pub fn from_config(config: &AppConfig) -> Result<(Self, Vec<String>), StartupError> {
        let matrix = match &config.matrix_path {
            Some(path) => load_matrix(path)?,
            None => riskgate_core::default_matrix(),
        };
        let mut engine = Self::new(Assessor::new(matrix, config.max_persons)?);
        let mut warnings = Vec::new();
        if let Some(source) = &config.incidence_source {
            let source = IncidenceSource::parse(source, config.incidence_cache.clone());
            let loaded = load_incidence(&source)?;
            warnings = loaded.warnings;
            engine = engine.with_incidence(source, loaded.table);
        }
        if let Some(path) = &config.profile_path {
            engine.profile_path = Some(path.clone());
            if path.exists() {
                let text = fs::read_to_string(path).map_err(|e| StartupError::Read {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                let profile = parse_profile(&text).map_err(|source| StartupError::Profile {
                    path: path.clone(),
                    source,
                })?;
                *write_lock(&engine.profile) = Some(profile);
            }
        }
        Ok((engine, warnings))
    }

    pub fn with_incidence(mut self, source: IncidenceSource, table: IncidenceTable) -> Self {
        self.incidence_source = Some(source);
        self.incidence = RwLock::new(Arc::new(table));
        self
    }

    /// Fixes the date used for region lookups without a date.
    pub fn with_today(mut self, today: NaiveDate) -> Self {
        self.today = Some(today);
        self
    }

    pub fn with_profile_path(mut self, path: PathBuf) -> Self {
        self.profile_path = Some(path);
        self
    }

    pub fn assessor(&self) -> &Assessor {
        &self.assessor
    }

    fn today(&self) -> NaiveDate {
        self.today.unwrap_or_else(|| chrono::Local::now().date_naive())
    }

    fn incidence_table(&self) -> Arc<IncidenceTable> {
        Arc::clone(&read_lock(&self.incidence))
    }

    fn profile_or_stored(&self, profile: Option<PersonProfile>) -> Result<PersonProfile, EngineError> {
        let profile = match profile {
            Some(p) => p,
            None => read_lock(&self.profile)
                .clone()
                .ok_or_else(|| ParseError::field("profile", "missing, and no profile is stored"))?,
        };
        profile
            .validate()
            .map_err(|e| ParseError::field("profile.age", e.to_string()))?;
        Ok(profile)
    }

    fn resolve(&self, doc: ScenarioDocument, table: &IncidenceTable, prefix: &str) -> Result<ResolvedScenario, EngineError> {
        let context = self.incidence_source.as_ref().map(|_| IncidenceContext {
            table,
            today: self.today(),
        });
        doc.resolve(context).map_err(|e| e.within(prefix).into())
    }

    pub fn assess(&self, request: AssessRequest) -> Result<AssessResponse, EngineError> {
        let profile = self.profile_or_stored(request.profile)?;
        let table = self.incidence_table();
        let resolved = self.resolve(request.scenario, &table, "scenario")?;
        let assessment = self.assessor.assess(&resolved.scenario, &profile)?;
        Ok(AssessResponse {
            assessment,
            incidence: resolved.incidence,
        })
    }

    pub fn what_if(&self, request: AssessRequest) -> Result<WhatIfResponse, EngineError> {
        let profile = self.profile_or_stored(request.profile)?;
        let table = self.incidence_table();
        let resolved = self.resolve(request.scenario, &table, "scenario")?;
        let assessment = self.assessor.assess(&resolved.scenario, &profile)?;
        let mitigations = self.assessor.what_if(&resolved.scenario, &profile)?;
        Ok(WhatIfResponse {
            assessment: AssessResponse {
                assessment,
                incidence: resolved.incidence,
            },
            mitigations,
        })
    }

    pub fn schedule(&self, request: ScheduleRequest) -> Result<ScheduleAssessment, EngineError> {
        let profile = self.profile_or_stored(request.profile)?;
        let table = self.incidence_table();
        let entries = request
            .entries
            .into_iter()
            .enumerate()
            .map(|(i, doc)| self.resolve(doc, &table, &format!("entries[{i}]")).map(|r| r.scenario))
            .collect::<Result<Vec<_>, _>>()?;
        let schedule = Schedule::new(entries)?;
        Ok(self.assessor.assess_schedule(&schedule, &profile)?)
    }

    pub fn incidence(&self, region: Option<&str>, date: Option<&str>) -> Result<ResolvedIncidence, EngineError> {
        let region = region
            .filter(|r| !r.trim().is_empty())
            .ok_or_else(|| ParseError::field("region", "query parameter is required"))?;
        let date = match date {
            Some(d) => d
                .parse::<NaiveDate>()
                .map_err(|e| ParseError::field("date", format!("expected YYYY-MM-DD: {e}")))?,
            None => self.today(),
        };
        if self.incidence_source.is_none() {
            return Err(EngineError::NotFound("no incidence source is configured".into()));
        }
        self.incidence_table()
            .resolve(region, date)
            .map_err(|e| EngineError::NotFound(e.to_string()))
    }

    /// Reloads the incidence source and swaps the table in one step.
    pub fn reload_incidence(&self) -> Result<ReloadResponse, EngineError> {
        let source = self
            .incidence_source
            .as_ref()
            .ok_or_else(|| EngineError::NotFound("no incidence source is configured".into()))?;
        let loaded = load_incidence(source).map_err(EngineError::Upstream)?;
        let response = ReloadResponse {
            records: loaded.table.len(),
            regions: loaded.table.regions().count(),
            warnings: loaded.warnings,
        };
        *write_lock(&self.incidence) = Arc::new(loaded.table);
        Ok(response)
    }

    pub fn tables(&self) -> TablesResponse {
        TablesResponse {
            max_persons: self.assessor.max_persons(),
            tables: ALL_TABLES.to_vec(),
        }
    }

    pub fn matrix(&self) -> MatrixGrid {
        self.assessor.matrix().to_grid()
    }

    pub fn health(&self) -> HealthResponse {
        let matrix = self.assessor.matrix();
        HealthResponse {
            status: "ok",
            matrix: MatrixInfo {
                name: matrix.name().to_string(),
                version: matrix.version().to_string(),
            },
            max_persons: self.assessor.max_persons(),
            incidence_records: self.incidence_table().len(),
        }
    }

    pub fn profile(&self) -> Result<ProfileResponse, EngineError> {
        let profile = read_lock(&self.profile)
            .clone()
            .ok_or_else(|| EngineError::NotFound("no profile is stored".into()))?;
        profile_response(profile)
    }

    /// Validates, persists and stores a profile.
    pub fn put_profile(&self, profile: PersonProfile) -> Result<ProfileResponse, EngineError> {
        profile
            .validate()
            .map_err(|e| ParseError::field("age", e.to_string()))?;
        if let Some(path) = &self.profile_path {
            persist(path, &profile).map_err(|e| EngineError::Internal(format!("{}: {e}", path.display())))?;
        }
        *write_lock(&self.profile) = Some(profile.clone());
        profile_response(profile)
    }
}

fn profile_response(profile: PersonProfile) -> Result<ProfileResponse, EngineError> {
    let severity = classify_severity(&profile).map_err(|e| ParseError::field("age", e.to_string()))?;
    Ok(ProfileResponse { profile, severity })
}

/// Writes next to the target and renames, so readers never see a partial file.
fn persist(path: &Path, profile: &PersonProfile) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(profile).map_err(std::io::Error::other)?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}
