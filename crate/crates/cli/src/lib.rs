//! Command-line tool and local JSON service for the riskgate engine.
//!
//! [`api::Engine`] holds the configured matrix, incidence table and stored
//! profile; both [`commands`] and [`service`] produce their JSON through it.

pub mod api;
pub mod commands;
pub mod config;
pub mod service;

pub use api::{AssessRequest, AssessResponse, Engine, EngineError, ScheduleRequest, WhatIfResponse};
pub use config::{AppConfig, ConfigError};
