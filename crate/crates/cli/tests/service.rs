//! Endpoint tests through the router; one test also binds a loopback socket.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use riskgate_cli::api::Engine;
use riskgate_cli::service::router;
use riskgate_cli::AppConfig;
use riskgate_core::tables::ALL_TABLES;
use riskgate_core::{default_matrix, Assessor, IncidenceSource, IncidenceTable};

const SHOPPING: &str = r#"{"persons": 30, "weekly_incidence": 80, "exposures_per_week": 3, "duration_minutes": 4}"#;

fn engine() -> Engine {
    let table = IncidenceTable::from_csv("berlin,2021-03-22,80.4\nrostock,2021-03-01,9.9\n")
        .unwrap()
        .table;
    Engine::new(Assessor::new(default_matrix(), 100).unwrap())
        .with_incidence(IncidenceSource::File("unused.csv".into()), table)
        .with_today("2021-03-24".parse().unwrap())
}

async fn call(engine: &Arc<Engine>, method: Method, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = router(Arc::clone(engine)).oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

fn shared() -> Arc<Engine> {
    Arc::new(engine())
}

#[tokio::test]
async fn assess_shopping_for_class_vi() {
    let e = shared();
    let body = format!(r#"{{"scenario": {SHOPPING}, "profile": {{"age": 55}}}}"#);
    let (status, v) = call(&e, Method::POST, "/assess", Some(&body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["f"], 10);
    assert_eq!(v["risk"], "green");
    assert_eq!(v["severity"], "VI");
    assert_eq!(v["refused"], false);
}

#[tokio::test]
async fn identical_bodies_give_identical_responses() {
    let e = shared();
    let body = format!(r#"{{"scenario": {SHOPPING}, "profile": {{"age": 55, "occupational_exposure": "very_high"}}}}"#);
    let first = call(&e, Method::POST, "/whatif", Some(&body)).await;
    let second = call(&e, Method::POST, "/whatif", Some(&body)).await;
    assert_eq!(first, second);
    assert_eq!(first.1["assessment"]["risk"], "red");
    assert!(!first.1["mitigations"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn crowds_are_refused_not_errors() {
    let e = shared();
    let body = r#"{"scenario": {"persons": 500, "weekly_incidence": 80, "exposures_per_week": 1, "duration_minutes": 120}, "profile": {"age": 30}}"#;
    let (status, v) = call(&e, Method::POST, "/assess", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["refused"], true);
    assert_eq!(v["f"], Value::Null);
    assert!(v["notes"][0].as_str().unwrap().contains("should not be performed"));
}

#[tokio::test]
async fn invalid_bodies_name_the_field() {
    let e = shared();
    let cases = [
        (r#"{"scenario": {"persons": -1, "weekly_incidence": 80, "exposures_per_week": 3, "duration_minutes": 4}, "profile": {"age": 30}}"#, "scenario.persons"),
        (r#"{"scenario": {"persons": 3, "weekly_incidence": 80, "exposures_per_week": 3, "duration_minutes": 4, "mask": "scarf"}, "profile": {"age": 30}}"#, "scenario.mask"),
        (r#"{"scenario": {"persons": 3, "weekly_incidence": 80, "exposures_per_week": 3, "duration_minutes": 4}, "profile": {"age": 300}}"#, "profile.age"),
        (r#"{"scenario": {"persons": 3, "weekly_incidence": 80, "exposures_per_week": 3, "duration_minutes": 4}}"#, "profile"),
        (r#"{"scenario": {"persons": 3, "region": "atlantis", "exposures_per_week": 3, "duration_minutes": 4}, "profile": {"age": 30}}"#, "scenario.region"),
    ];
    for (body, field) in cases {
        let (status, v) = call(&e, Method::POST, "/assess", Some(body)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(v["error"]["kind"], "invalid_request");
        assert_eq!(v["error"]["field"], field, "{v}");
    }
    let (status, v) = call(&e, Method::POST, "/assess", Some("{not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"]["line"].is_number());
}

#[tokio::test]
async fn schedule_reports_each_entry() {
    let e = shared();
    let body = format!(
        r#"{{"entries": [{SHOPPING}, {{"label": "metro", "persons": 30, "weekly_incidence": 20, "exposures_per_week": 10, "duration_minutes": 7, "mask": "ffp2"}}],
            "profile": {{"age": 55, "occupational_exposure": "very_high"}}}}"#
    );
    let (status, v) = call(&e, Method::POST, "/schedule", Some(&body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["headline"], "red");
    assert_eq!(v["entries"][0]["assessment"]["f"], 10);
    assert_eq!(v["entries"][1]["assessment"]["f"], 9);
    assert_eq!(v["entries"][1]["label"], "metro");
    assert!(v["warning"].as_str().unwrap().contains("joint"));

    let (status, v) = call(&e, Method::POST, "/schedule", Some(r#"{"entries": [], "profile": {"age": 3}}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "entries");
}

#[tokio::test]
async fn tables_round_trip_the_core_constants() {
    let e = shared();
    let (status, v) = call(&e, Method::GET, "/tables", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["max_persons"], 100);
    let expected: Vec<Value> = ALL_TABLES.iter().map(|t| serde_json::to_value(t).unwrap()).collect();
    assert_eq!(v["tables"].as_array().unwrap(), &expected);
    let symbols: Vec<&str> = v["tables"].as_array().unwrap().iter().map(|t| t["symbol"].as_str().unwrap()).collect();
    assert_eq!(symbols, ["N", "W", "C", "T", "D", "M", "V"]);
}

#[tokio::test]
async fn matrix_grid() {
    let e = shared();
    let (_, v) = call(&e, Method::GET, "/matrix", None).await;
    assert_eq!(v["columns"], json!(["I", "II", "III", "IV", "V", "VI"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[7], json!({"f": 10, "cells": ["red", "red", "red", "yellow", "yellow", "green"]}));
}

#[tokio::test]
async fn incidence_lookup() {
    let e = shared();
    let (status, v) = call(&e, Method::GET, "/incidence?region=Berlin&date=2021-03-23", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["w"], 3);
    assert_eq!(v["stale"], false);
    assert_eq!(v["record_date"], "2021-03-22");

    let (_, v) = call(&e, Method::GET, "/incidence?region=rostock", None).await;
    assert_eq!((v["w"].clone(), v["stale"].clone()), (json!(1), json!(true)));

    let (status, _) = call(&e, Method::GET, "/incidence?region=atlantis", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, v) = call(&e, Method::GET, "/incidence", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "region");
    let (status, v) = call(&e, Method::GET, "/incidence?region=berlin&date=yesterday", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "date");
}

#[tokio::test]
async fn assess_with_region_reports_the_record() {
    let e = shared();
    let body = r#"{"scenario": {"persons": 30, "region": "berlin", "exposures_per_week": 3, "duration_minutes": 4}, "profile": {"age": 55}}"#;
    let (status, v) = call(&e, Method::POST, "/assess", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["f"], 10);
    assert_eq!(v["incidence"]["weekly_incidence"], 80.4);
}

#[tokio::test]
async fn profile_is_stored_and_used() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.json");
    let e = Arc::new(engine().with_profile_path(path.clone()));

    let (status, _) = call(&e, Method::GET, "/profile", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, v) = call(&e, Method::PUT, "/profile", Some(r#"{"age": 55, "occupational_exposure": "very_high"}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["severity"], "I");
    assert!(path.exists());

    let (_, v) = call(&e, Method::GET, "/profile", None).await;
    assert_eq!(v["profile"]["age"], 55);

    let (_, v) = call(&e, Method::POST, "/assess", Some(&format!(r#"{{"scenario": {SHOPPING}}}"#))).await;
    assert_eq!(v["risk"], "red");

    let (status, v) = call(&e, Method::PUT, "/profile", Some(r#"{"age": 55, "hobby": "darts"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["field"], "hobby");

    // A restart picks the stored profile up again.
    let config = AppConfig {
        profile_path: Some(path),
        ..AppConfig::default()
    };
    let (restarted, _) = Engine::from_config(&config).unwrap();
    assert_eq!(restarted.profile().unwrap().profile.age, 55);
}

#[tokio::test]
async fn reload_swaps_incidence() {
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("inc.csv");
    fs::write(&path, "berlin,2021-03-22,20\n").unwrap();
    let config = AppConfig {
        incidence_source: Some(path.to_string_lossy().into_owned()),
        ..AppConfig::default()
    };
    let (e, _) = Engine::from_config(&config).unwrap();
    let e = Arc::new(e);
    let (_, v) = call(&e, Method::GET, "/incidence?region=berlin&date=2021-03-22", None).await;
    assert_eq!(v["w"], 2);
    fs::write(&path, "berlin,2021-03-22,150\n").unwrap();
    let (status, v) = call(&e, Method::POST, "/incidence/reload", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["records"], 1);
    let (_, v) = call(&e, Method::GET, "/incidence?region=berlin&date=2021-03-22", None).await;
    assert_eq!(v["w"], 4);

    fs::write(&path, "berlin,2021-03-22,-5\n").unwrap();
    let (status, v) = call(&e, Method::POST, "/incidence/reload", None).await;
    assert_eq!(status, StatusCode::INTERNAL_SERVER_ERROR);
    assert_eq!(v["error"]["message"], "internal error");
    // The previous table stays in place.
    let (_, v) = call(&e, Method::GET, "/incidence?region=berlin&date=2021-03-22", None).await;
    assert_eq!(v["w"], 4);
}

#[tokio::test]
async fn health_and_unknown_routes() {
    let e = shared();
    let (status, v) = call(&e, Method::GET, "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["matrix"]["name"], "default");
    assert_eq!(v["incidence_records"], 2);
    let (status, v) = call(&e, Method::GET, "/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["kind"], "not_found");
}

#[tokio::test]
async fn serves_on_a_loopback_socket() {
    use std::io::{Read, Write};

    let listener = tokio::net::TcpListener::bind(riskgate_cli::service::loopback(0)).await.unwrap();
    let addr = listener.local_addr().unwrap();
    assert!(addr.ip().is_loopback());
    let server = tokio::spawn(riskgate_cli::service::serve(listener, shared()));

    let response = tokio::task::spawn_blocking(move || {
        let mut stream = std::net::TcpStream::connect(addr).unwrap();
        stream
            .write_all(b"GET /health HTTP/1.1\r\nhost: localhost\r\nconnection: close\r\n\r\n")
            .unwrap();
        let mut response = String::new();
        stream.read_to_string(&mut response).unwrap();
        response
    })
    .await
    .unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"status\":\"ok\""));
    server.abort();
}
