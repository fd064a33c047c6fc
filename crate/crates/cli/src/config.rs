//! Runtime configuration: a TOML file plus environment overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use riskgate_core::DEFAULT_MAX_PERSONS;

pub const ENV_PORT: &str = "RISKGATE_PORT";
pub const ENV_MATRIX: &str = "RISKGATE_MATRIX";
pub const ENV_INCIDENCE: &str = "RISKGATE_INCIDENCE";

pub const DEFAULT_PORT: u16 = 8787;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Read { path: PathBuf, message: String },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{name}: {message}")]
    Env { name: &'static str, message: String },

    #[error("listen_port must be in 1..=65535, got {0}")]
    Port(i64),

    #[error("max_persons must be at least 1, got {0}")]
    MaxPersons(i64),
}

/// Settings shared by the CLI and the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    /// Matrix text file; the built-in matrix when absent.
    #[serde(default)]
    pub matrix_path: Option<PathBuf>,
    /// CSV or JSON file path, or an http(s) URL.
    #[serde(default)]
    pub incidence_source: Option<String>,
    /// Where the last good remote response is kept.
    #[serde(default)]
    pub incidence_cache: Option<PathBuf>,
    #[serde(default = "default_max_persons")]
    pub max_persons: u32,
    #[serde(default = "default_port")]
    pub listen_port: u16,
    /// JSON document holding the stored profile.
    #[serde(default)]
    pub profile_path: Option<PathBuf>,
}

fn default_max_persons() -> u32 {
    DEFAULT_MAX_PERSONS
}

fn default_port() -> u16 {
    DEFAULT_PORT
}

impl Default for AppConfig {
    fn default() -> Self {
        Self {
            matrix_path: None,
            incidence_source: None,
            incidence_cache: None,
            max_persons: DEFAULT_MAX_PERSONS,
            listen_port: DEFAULT_PORT,
            profile_path: None,
        }
    }
}

/// Same fields with wide integers so range errors get a proper message.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    matrix_path: Option<PathBuf>,
    #[serde(default)]
    incidence_source: Option<String>,
    #[serde(default)]
    incidence_cache: Option<PathBuf>,
    #[serde(default)]
    max_persons: Option<i64>,
    #[serde(default)]
    listen_port: Option<i64>,
    #[serde(default)]
    profile_path: Option<PathBuf>,
}

fn port(value: i64) -> Result<u16, ConfigError> {
    u16::try_from(value)
        .ok()
        .filter(|p| *p >= 1)
        .ok_or(ConfigError::Port(value))
}

fn max_persons(value: i64) -> Result<u32, ConfigError> {
    u32::try_from(value)
        .ok()
        .filter(|n| *n >= 1)
        .ok_or(ConfigError::MaxPersons(value))
}

impl AppConfig {
    /// Parses TOML text read from `origin`; relative paths are resolved
    /// against its directory.
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = origin.parent().unwrap_or(Path::new(""));
        let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        let incidence_source = raw.incidence_source.map(|s| {
            if s.starts_with("http://") || s.starts_with("https://") {
                s
            } else {
                resolve(PathBuf::from(s)).to_string_lossy().into_owned()
            }
        });
        Ok(Self {
            matrix_path: raw.matrix_path.map(resolve),
            incidence_source,
            incidence_cache: raw.incidence_cache.map(resolve),
            max_persons: raw.max_persons.map(max_persons).transpose()?.unwrap_or(DEFAULT_MAX_PERSONS),
            listen_port: raw.listen_port.map(port).transpose()?.unwrap_or(DEFAULT_PORT),
            profile_path: raw.profile_path.map(resolve),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text, path)
    }

    /// Applies `RISKGATE_*` overrides read through `var`.
    pub fn with_env<F>(mut self, var: F) -> Result<Self, ConfigError>
    where
        F: Fn(&str) -> Option<String>,
    {
        if let Some(value) = var(ENV_PORT) {
            let parsed: i64 = value.trim().parse().map_err(|_| ConfigError::Env {
                name: ENV_PORT,
                message: format!("not an integer: `{value}`"),
            })?;
            self.listen_port = port(parsed)?;
        }
        if let Some(value) = var(ENV_MATRIX).filter(|v| !v.is_empty()) {
            self.matrix_path = Some(PathBuf::from(value));
        }
        if let Some(value) = var(ENV_INCIDENCE).filter(|v| !v.is_empty()) {
            self.incidence_source = Some(value);
        }
        Ok(self)
    }

    /// Applies overrides from the process environment.
    pub fn with_process_env(self) -> Result<Self, ConfigError> {
        self.with_env(|name| std::env::var(name).ok())
    }
}
