use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ndswarm_server::api::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn app() -> (Router, Arc<AppState>) {
    let state = AppState::new(1000.0);
    (router(Arc::clone(&state)), state)
}

async fn call(app: &Router, method: Method, uri: &str, content_type: &str, body: impl Into<Body>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, content_type)
        .body(body.into())
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn post_json(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let (status, text) = call(app, Method::POST, uri, "application/json", body.to_string()).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    call(app, Method::GET, uri, "application/json", Body::empty()).await
}

async fn wine_session(app: &Router) -> String {
    let (status, ds) = post_json(app, "/datasets", json!({"source": {"csv": {"path": data("winequality-red.csv")}}})).await;
    assert_eq!(status, StatusCode::CREATED, "{ds}");
    assert_eq!((ds["n"].as_u64(), ds["n_total"].as_u64()), (Some(12), Some(1599)));
    let (status, s) = post_json(app, "/sessions", json!({"dataset": ds["id"]})).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(s["dataset"]["n_total"], 1599);
    s["session"].as_str().unwrap().to_string()
}

fn assignment(file: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(data(file)).unwrap()).unwrap()
}

#[tokio::test]
async fn csv_upload_with_labels() {
    let (app, _) = app();
    let csv = "x;y;name\n1;2;a\n3;4;b\n5;;c\n";
    let (status, text) =
        call(&app, Method::POST, "/datasets?label_column=name&delimiter=%3B", "text/csv", csv).await;
    assert_eq!(status, StatusCode::CREATED, "{text}");
    let body: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(body["n_total"], 2);
    assert_eq!(body["labels"], true);
    assert_eq!(body["names"], json!(["x", "y"]));

    let (status, text) =
        call(&app, Method::POST, "/datasets?missing_policy=strict&delimiter=%3B", "text/csv", csv).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{text}");

    let (status, text) = get(&app, "/datasets").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap().as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn session_lifecycle() {
    let (app, _) = app();
    let id = wine_session(&app).await;

    let (status, text) = get(&app, &format!("/sessions/{id}/frame")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap()["error"], "assignment required");

    let uri = format!("/sessions/{id}/command");
    let (status, state) =
        post_json(&app, &uri, json!({"type": "set_assignment", "assignment": assignment("wine-assignment.json")})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["counts"]["h_s"], 4);
    let (status, _) = post_json(&app, &uri, json!({"type": "rotate", "plane": "XT", "angle": 0.5})).await;
    assert_eq!(status, StatusCode::OK);

    let (status, text) = get(&app, &format!("/sessions/{id}/frame")).await;
    assert_eq!(status, StatusCode::OK);
    let frame: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(frame["seq"], 1);
    assert_eq!(frame["n_total"], 1599);
    assert_eq!(frame["n_visible"].as_u64().unwrap() as usize, frame["points"].as_array().unwrap().len());
    let (_, again) = post_json(&app, &uri, json!({"type": "request_frame"})).await;
    assert_eq!(again["seq"], 2);
    assert_eq!(again["points"], frame["points"]);

    let (status, text) = get(&app, &format!("/sessions/{id}")).await;
    assert_eq!(status, StatusCode::OK);
    let summary: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(summary["version"], 2);
    assert_eq!(summary["next_seq"], 3);
}

#[tokio::test]
async fn errors_map_to_status_codes() {
    let (app, _) = app();
    let id = wine_session(&app).await;
    let uri = format!("/sessions/{id}/command");

    let (status, _) = post_json(&app, "/sessions/session-404/command", json!({"type": "request_frame"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = post_json(&app, "/sessions", json!({"dataset": "ds-404"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = post_json(&app, &uri, json!({"type": "warp"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = post_json(&app, &uri, json!({"type": "set_slab", "threshold": 0})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].as_str().unwrap().contains("positive"));
    let (status, _) = post_json(
        &app,
        &uri,
        json!({"type": "set_assignment", "assignment": {"alcohol": {"category": "spatial", "target": "X"}, "pH": {"category": "spatial", "target": "X"}}}),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    // None of the rejected commands moved the version.
    let (_, text) = get(&app, &format!("/sessions/{id}")).await;
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap()["version"], 0);
}

#[tokio::test]
async fn pca_report_endpoint() {
    let (app, _) = app();
    let id = wine_session(&app).await;
    let (status, _) = get(&app, &format!("/sessions/{id}/pca-report")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    post_json(
        &app,
        &format!("/sessions/{id}/command"),
        json!({"type": "set_assignment", "assignment": assignment("wine-pca-assignment.json")}),
    )
    .await;
    let (status, text) = get(&app, &format!("/sessions/{id}/pca-report?scope=anonymous-and-spatial&scaling=centered")).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["names"].as_array().unwrap().len(), 7);
    assert_eq!(report["scaling"], "centered");
    let (status, _) = get(&app, &format!("/sessions/{id}/pca-report?scope=everything")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn synthetic_and_registered_sources() {
    let (app, state) = app();
    let (status, ds) = post_json(
        &app,
        "/datasets",
        json!({"source": {"synthetic": {"archetype": "politicians", "n_points": 12, "seed": 0}}}),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(ds["n"], 10);

    let preloaded = state.add_dataset(
        ndswarm::dataset::load_csv(data("winequality-red.csv"), &Default::default()).unwrap(),
    );
    let (_, s) = post_json(&app, "/sessions", json!({"dataset": preloaded})).await;
    let uri = format!("/sessions/{}/command", s["session"].as_str().unwrap());
    let (status, state) =
        post_json(&app, &uri, json!({"type": "load_dataset", "source": {"registered": ds["id"]}})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["dataset"]["n_total"], 12);
}
