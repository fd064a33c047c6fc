//! Local JSON service over the engine.

use std::collections::HashMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;

use riskgate_core::scenario::from_json_str;
use riskgate_core::{IncidenceError, ParseError, PersonProfile};

use crate::api::{AssessRequest, Engine, EngineError, ScheduleRequest};

type Shared = State<Arc<Engine>>;

/// Builds the router; state is shared by all requests.
pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/assess", post(assess))
        .route("/whatif", post(what_if))
        .route("/schedule", post(schedule))
        .route("/matrix", get(matrix))
        .route("/tables", get(tables))
        .route("/incidence", get(incidence))
        .route("/incidence/reload", post(reload))
        .route("/profile", get(profile).put(put_profile))
        .route("/health", get(health))
        .fallback(not_found)
        .with_state(engine)
}

/// The loopback address the service listens on.
pub fn loopback(port: u16) -> SocketAddr {
    SocketAddr::from((Ipv4Addr::LOCALHOST, port))
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, engine: Arc<Engine>) -> std::io::Result<()> {
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// JSON error body plus status.
#[derive(Debug)]
pub struct ApiError(EngineError);

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        Self(e)
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        Self(EngineError::Invalid(e))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self.0 {
            EngineError::Invalid(p) => (
                StatusCode::BAD_REQUEST,
                json!({"error": {
                    "kind": "invalid_request",
                    "field": p.field,
                    "line": p.line,
                    "column": p.column,
                    "message": p.message,
                }}),
            ),
            EngineError::NotFound(message) => (
                StatusCode::NOT_FOUND,
                json!({"error": {"kind": "not_found", "message": message}}),
            ),
            EngineError::Upstream(e @ IncidenceError::Transport { .. }) => {
                eprintln!("incidence reload: {e}");
                (
                    StatusCode::BAD_GATEWAY,
                    json!({"error": {"kind": "upstream", "message": "incidence source unreachable"}}),
                )
            }
            other => {
                eprintln!("internal error: {other}");
                (
                    StatusCode::INTERNAL_SERVER_ERROR,
                    json!({"error": {"kind": "internal", "message": "internal error"}}),
                )
            }
        };
        (status, Json(body)).into_response()
    }
}

fn body<T: serde::de::DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::field("", "body is not UTF-8"))?;
    Ok(from_json_str(text)?)
}

fn ok<T: Serialize>(value: T) -> Response {
    Json(value).into_response()
}

async fn assess(State(engine): Shared, bytes: Bytes) -> Result<Response, ApiError> {
    let request: AssessRequest = body(&bytes)?;
    Ok(ok(engine.assess(request)?))
}

async fn what_if(State(engine): Shared, bytes: Bytes) -> Result<Response, ApiError> {
    let request: AssessRequest = body(&bytes)?;
    Ok(ok(engine.what_if(request)?))
}

async fn schedule(State(engine): Shared, bytes: Bytes) -> Result<Response, ApiError> {
    let request: ScheduleRequest = body(&bytes)?;
    let engine = Arc::clone(&engine);
    // Entries fan out on the rayon pool; keep that off the async workers.
    let result = tokio::task::spawn_blocking(move || engine.schedule(request))
        .await
        .map_err(|e| EngineError::Internal(e.to_string()))?;
    Ok(ok(result?))
}

async fn matrix(State(engine): Shared) -> Response {
    ok(engine.matrix())
}

async fn tables(State(engine): Shared) -> Response {
    ok(engine.tables())
}

async fn health(State(engine): Shared) -> Response {
    ok(engine.health())
}

async fn incidence(State(engine): Shared, Query(query): Query<HashMap<String, String>>) -> Result<Response, ApiError> {
    let result = engine.incidence(query.get("region").map(String::as_str), query.get("date").map(String::as_str))?;
    Ok(ok(result))
}

async fn reload(State(engine): Shared) -> Result<Response, ApiError> {
    let engine = Arc::clone(&engine);
    let result = tokio::task::spawn_blocking(move || engine.reload_incidence())
        .await
        .map_err(|e| EngineError::Internal(e.to_string()))?;
    Ok(ok(result?))
}

async fn profile(State(engine): Shared) -> Result<Response, ApiError> {
    Ok(ok(engine.profile()?))
}

async fn put_profile(State(engine): Shared, bytes: Bytes) -> Result<Response, ApiError> {
    let profile: PersonProfile = body(&bytes)?;
    Ok(ok(engine.put_profile(profile)?))
}

async fn not_found() -> ApiError {
    ApiError(EngineError::NotFound("no such endpoint".into()))
}
