//! Command-line front end: argument parsing, rendering and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use riskgate_core::calibration::conflict_findings;
use riskgate_core::matrix::Finding;
use riskgate_core::scenario::from_json_str;
use riskgate_core::{
    check_points, detect_conflicts, default_matrix, parse_points, validate_matrix, Assessment, IncidenceError,
    MatrixError, PersonProfile, RiskClass, RiskMatrix, ScenarioDocument, ScheduleAssessment,
};

use crate::api::{
    load_matrix, parse_profile, AssessRequest, AssessResponse, Engine, EngineError, ScheduleRequest, StartupError,
    WhatIfResponse,
};
use crate::config::{AppConfig, ConfigError};
use crate::service;

/// Process exit codes.
pub mod exit {
    pub const GREEN: u8 = 0;
    pub const YELLOW: u8 = 1;
    pub const ORANGE: u8 = 2;
    pub const RED: u8 = 3;
    pub const REFUSED: u8 = 4;
    /// A validation or calibration check found problems.
    pub const CHECK_FAILED: u8 = 3;
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const NO_INPUT: u8 = 66;
    pub const UNAVAILABLE: u8 = 69;
    pub const SOFTWARE: u8 = 70;
    pub const CONFIG: u8 = 78;
}

#[derive(Debug, Parser)]
#[command(name = "riskgate", version, about = "A-priori infection risk assessment for planned activities")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Matrix text file; overrides the configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub matrix: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assess one scenario.
    Assess(ScenarioArgs),
    /// List ranked mitigations for one scenario.
    Whatif(ScenarioArgs),
    /// Assess a list of scenarios one by one.
    Schedule(ScheduleArgs),
    /// Matrix tools.
    #[command(subcommand)]
    Matrix(MatrixCommand),
    /// Calibration tools.
    #[command(subcommand)]
    Calibrate(CalibrateCommand),
    /// Run the local JSON service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON document.
    #[arg(long, value_name = "PATH")]
    pub scenario: PathBuf,

    /// Profile JSON document; the stored profile when absent.
    #[arg(long, value_name = "PATH")]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// JSON array of scenarios, or an object with `entries` and optional `profile`.
    #[arg(long, value_name = "PATH")]
    pub schedule: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MatrixCommand {
    /// Check monotonicity and class jumps.
    Validate,
}

#[derive(Debug, Subcommand)]
pub enum CalibrateCommand {
    /// Check calibration points for conflicts and against the matrix.
    Check {
        /// JSON lines file of calibration points.
        #[arg(long, value_name = "PATH")]
        points: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Port on 127.0.0.1; overrides configuration and environment.
    #[arg(long)]
    pub port: Option<u16>,
}

/// An error that ends the command with a diagnostic.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Read { .. } => exit::NO_INPUT,
            _ => exit::CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

impl From<StartupError> for Failure {
    fn from(e: StartupError) -> Self {
        let code = match &e {
            StartupError::Read { .. } | StartupError::Incidence(IncidenceError::Io { .. }) => exit::NO_INPUT,
            StartupError::Incidence(IncidenceError::Transport { .. }) => exit::UNAVAILABLE,
            _ => exit::DATA,
        };
        Self::new(code, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::Invalid(_) | EngineError::NotFound(_) => exit::DATA,
            EngineError::Upstream(_) => exit::UNAVAILABLE,
            EngineError::Internal(_) => exit::SOFTWARE,
        };
        Self::new(code, e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(exit::NO_INPUT, format!("{}: {e}", path.display())))
}

fn data_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::new(exit::DATA, format!("{}: {e}", path.display()))
}

fn read_profile(path: Option<&Path>) -> Result<Option<PersonProfile>, Failure> {
    path.map(|p| parse_profile(&read_input(p)?).map_err(|e| data_error(p, e)))
        .transpose()
}

fn read_scenario(path: &Path) -> Result<ScenarioDocument, Failure> {
    from_json_str(&read_input(path)?).map_err(|e| data_error(path, e))
}

fn read_schedule(path: &Path) -> Result<ScheduleRequest, Failure> {
    let text = read_input(path)?;
    let parsed = if text.trim_start().starts_with('[') {
        from_json_str::<Vec<ScenarioDocument>>(&text).map(|entries| ScheduleRequest { entries, profile: None })
    } else {
        from_json_str::<ScheduleRequest>(&text)
    };
    parsed.map_err(|e| data_error(path, e))
}

fn class_code(risk: RiskClass) -> u8 {
    match risk {
        RiskClass::Green => exit::GREEN,
        RiskClass::Yellow => exit::YELLOW,
        RiskClass::Orange => exit::ORANGE,
        RiskClass::Red => exit::RED,
    }
}

fn assessment_code(a: &Assessment) -> u8 {
    if a.refused {
        exit::REFUSED
    } else {
        class_code(a.risk)
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("response types serialize");
    text.push('\n');
    text
}

fn headline(a: &Assessment) -> String {
    let class = a.risk.as_str().to_uppercase();
    match (a.refused, a.no_exposure, a.f) {
        (true, _, _) => format!("REFUSED severity={}", a.severity),
        (_, true, _) => format!("{class} no exposure severity={}", a.severity),
        (_, _, Some(f)) => format!("{class} f={f} severity={}", a.severity),
        _ => format!("{class} severity={}", a.severity),
    }
}

fn render_assessment(r: &AssessResponse) -> String {
    let a = &r.assessment;
    let mut out = String::new();
    let _ = writeln!(out, "{}", headline(a));
    let _ = writeln!(out, "{}", a.recommendation);
    if let Some(s) = &a.scored {
        let _ = writeln!(
            out,
            "scores: N={} W={} C={} T={} D={} M={} V={}",
            s.n, s.w, s.c, s.t, s.d, s.m, s.v
        );
    }
    if let Some(i) = &r.incidence {
        let _ = writeln!(
            out,
            "incidence: {} {} {} (W={}){}",
            i.region,
            i.record_date,
            i.weekly_incidence,
            i.w,
            if i.stale { " stale" } else { "" }
        );
    }
    for note in &a.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn render_what_if(r: &WhatIfResponse) -> String {
    let mut out = render_assessment(&r.assessment);
    if r.mitigations.is_empty() {
        out.push_str("no mitigation lowers F further\n");
        return out;
    }
    out.push_str("mitigations:\n");
    for (i, m) in r.mitigations.iter().enumerate() {
        let changes: Vec<String> = m
            .changes
            .iter()
            .map(|c| format!("{:?} {}->{} ({})", c.field, c.from_score, c.to_score, c.band).to_lowercase())
            .collect();
        let _ = writeln!(
            out,
            "{:>3}. {} f={}  {}",
            i + 1,
            m.new_risk.as_str().to_uppercase(),
            m.new_f,
            changes.join(", ")
        );
    }
    out
}

fn render_schedule(s: &ScheduleAssessment) -> String {
    let mut out = format!("headline {}\n", s.headline.as_str().to_uppercase());
    for e in &s.entries {
        let label = if e.label.is_empty() { "-" } else { &e.label };
        let _ = writeln!(out, "{:>3}. {label}: {}", e.index + 1, headline(&e.assessment));
    }
    let _ = writeln!(out, "warning: {}", s.warning);
    out
}

fn render_findings(out: &mut String, findings: &[Finding], kind: &str) {
    for f in findings {
        let _ = writeln!(out, "{kind}: {}: {}", f.location(), f.message);
    }
}

#[derive(Debug, Serialize)]
struct MatrixReport<'a> {
    matrix: &'a str,
    version: &'a str,
    valid: bool,
    errors: &'a [Finding],
    warnings: &'a [Finding],
}

#[derive(Debug, Serialize)]
struct CalibrationReport {
    points: usize,
    valid: bool,
    conflicts: Vec<Finding>,
    matrix_valid: bool,
    errors: Vec<Finding>,
    warnings: Vec<Finding>,
}

struct Context {
    config: AppConfig,
    format: Format,
}

impl Context {
    fn engine(&self) -> Result<Engine, Failure> {
        let (engine, warnings) = Engine::from_config(&self.config)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok(engine)
    }

    fn matrix(&self) -> Result<RiskMatrix, Failure> {
        match &self.config.matrix_path {
            Some(path) => load_matrix(path).map_err(Failure::from),
            None => Ok(default_matrix()),
        }
    }

    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce(&T) -> String) -> String {
        match self.format {
            Format::Json => json(value),
            Format::Text => text(value),
        }
    }
}

fn execute(cli: Cli) -> Result<(u8, String), Failure> {
    let mut config = match &cli.config {
        Some(path) => AppConfig::load(path)?,
        None => AppConfig::default(),
    }
    .with_process_env()?;
    if let Some(path) = cli.matrix {
        config.matrix_path = Some(path);
    }
    let ctx = Context {
        config,
        format: cli.format,
    };

    match cli.command {
        Command::Assess(args) => {
            let request = AssessRequest {
                scenario: read_scenario(&args.scenario)?,
                profile: read_profile(args.profile.as_deref())?,
            };
            let response = ctx.engine()?.assess(request)?;
            Ok((assessment_code(&response.assessment), ctx.emit(&response, render_assessment)))
        }
        Command::Whatif(args) => {
            let request = AssessRequest {
                scenario: read_scenario(&args.scenario)?,
                profile: read_profile(args.profile.as_deref())?,
            };
            let response = ctx.engine()?.what_if(request)?;
            Ok((assessment_code(&response.assessment.assessment), ctx.emit(&response, render_what_if)))
        }
        Command::Schedule(args) => {
            let mut request = read_schedule(&args.schedule)?;
            if let Some(profile) = read_profile(args.profile.as_deref())? {
                request.profile = Some(profile);
            }
            let response = ctx.engine()?.schedule(request)?;
            let code = if response.entries.iter().any(|e| e.assessment.refused) {
                exit::REFUSED
            } else {
                class_code(response.headline)
            };
            Ok((code, ctx.emit(&response, render_schedule)))
        }
        Command::Matrix(MatrixCommand::Validate) => {
            let matrix = ctx.matrix()?;
            let report = validate_matrix(&matrix);
            let view = MatrixReport {
                matrix: matrix.name(),
                version: matrix.version(),
                valid: report.is_valid(),
                errors: &report.errors,
                warnings: &report.warnings,
            };
            let text = ctx.emit(&view, |v| {
                let mut out = format!(
                    "matrix {} version {}: {}, {}\n",
                    v.matrix,
                    v.version,
                    if v.valid { "valid" } else { "invalid" },
                    report.summary()
                );
                render_findings(&mut out, v.errors, "error");
                render_findings(&mut out, v.warnings, "warning");
                out
            });
            Ok((if report.is_valid() { exit::OK } else { exit::CHECK_FAILED }, text))
        }
        Command::Calibrate(CalibrateCommand::Check { points }) => {
            let text = read_input(&points)?;
            let parsed = parse_points(&text).map_err(|e| data_error(&points, e))?;
            let matrix = ctx.matrix()?;
            let conflicts = conflict_findings(&parsed, &detect_conflicts(&parsed));
            let (matrix_valid, report) = match check_points(&matrix, &parsed) {
                Ok(report) => (true, report),
                Err(MatrixError::Invalid(report)) => (false, report),
                Err(e) => return Err(Failure::new(exit::DATA, e.to_string())),
            };
            let view = CalibrationReport {
                points: parsed.len(),
                valid: matrix_valid && conflicts.is_empty() && report.errors.is_empty(),
                conflicts,
                matrix_valid,
                errors: report.errors,
                warnings: report.warnings,
            };
            let out = ctx.emit(&view, |v| {
                let mut out = format!(
                    "{} point(s), {} conflict(s), {} matrix error(s): {}\n",
                    v.points,
                    v.conflicts.len(),
                    v.errors.len(),
                    if v.valid { "ok" } else { "failed" }
                );
                render_findings(&mut out, &v.conflicts, "conflict");
                render_findings(&mut out, &v.errors, "error");
                render_findings(&mut out, &v.warnings, "warning");
                out
            });
            Ok((if view.valid { exit::OK } else { exit::CHECK_FAILED }, out))
        }
        Command::Serve(args) => {
            let port = args.port.unwrap_or(ctx.config.listen_port);
            if port == 0 {
                return Err(Failure::new(exit::USAGE, "port must be in 1..=65535"));
            }
            let engine = Arc::new(ctx.engine()?);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
            runtime
                .block_on(async {
                    let addr = service::loopback(port);
                    let listener = tokio::net::TcpListener::bind(addr).await?;
                    eprintln!("listening on http://{addr}");
                    service::serve(listener, engine).await
                })
                .map_err(|e| Failure::new(exit::UNAVAILABLE, e.to_string()))?;
            Ok((exit::OK, String::new()))
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                exit::USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                exit::OK
            };
        }
    };
    match execute(cli) {
        Ok((code, text)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return exit::SOFTWARE;
            }
            code
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

/// [`run`] over the process arguments and standard streams.
pub fn main() -> u8 {
    run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}
