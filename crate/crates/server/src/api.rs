//! HTTP and WebSocket front end over [`ndswarm::session`].
//!
//! Every session sits behind its own mutex, so commands for one session are
//! applied strictly in arrival order while distinct sessions run in parallel.

use std::collections::HashMap;
use std::io::Cursor;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ndswarm::dataset::{read_csv, Dataset, LoadOptions, MissingPolicy};
use ndswarm::projection::{PcaReportOptions, PcaScaling, PcaScope};
use ndswarm::session::{Command, DatasetSource, DatasetStore, Reply, Session, SessionError};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::watch;

pub const DEFAULT_PUSH_RATE: f64 = 60.0;

struct SessionHandle {
    session: Mutex<Session>,
    version: watch::Sender<u64>,
}

pub struct AppState {
    datasets: RwLock<DatasetStore>,
    sessions: RwLock<HashMap<String, Arc<SessionHandle>>>,
    next_session: Mutex<u64>,
    push_interval: Duration,
}

impl AppState {
    /// `max_push_rate` caps WebSocket frame pushes per second and session.
    pub fn new(max_push_rate: f64) -> Arc<Self> {
        assert!(max_push_rate > 0.0, "push rate must be positive");
        Arc::new(Self {
            datasets: RwLock::new(DatasetStore::new()),
            sessions: RwLock::new(HashMap::new()),
            next_session: Mutex::new(0),
            push_interval: Duration::from_secs_f64(1.0 / max_push_rate),
        })
    }

    pub fn add_dataset(&self, ds: Dataset) -> String {
        self.datasets.write().unwrap().insert(ds)
    }

    fn handle(&self, id: &str) -> Result<Arc<SessionHandle>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()).into())
    }

    fn create_session(&self, dataset_id: &str) -> Result<Session, SessionError> {
        let ds = self
            .datasets
            .read()
            .unwrap()
            .get(dataset_id)
            .ok_or_else(|| SessionError::UnknownDataset(dataset_id.to_string()))?;
        let mut counter = self.next_session.lock().unwrap();
        *counter += 1;
        let session = Session::new(format!("session-{}", *counter), ds);
        let (version, _) = watch::channel(session.version());
        self.sessions.write().unwrap().insert(
            session.id().to_string(),
            Arc::new(SessionHandle {
                session: Mutex::new(session.clone()),
                version,
            }),
        );
        Ok(session)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/datasets", post(upload_dataset).get(list_datasets))
        .route("/sessions", post(create_session))
        .route("/sessions/:id", get(session_state))
        .route("/sessions/:id/command", post(command))
        .route("/sessions/:id/frame", get(frame))
        .route("/sessions/:id/pca-report", get(pca_report))
        .route("/sessions/:id/stream", get(stream))
        .with_state(state)
}

pub struct ApiError(StatusCode, String);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::UnknownSession(_) | SessionError::UnknownDataset(_) => StatusCode::NOT_FOUND,
            SessionError::AssignmentRequired => StatusCode::CONFLICT,
            SessionError::Malformed(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn json_text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UploadQuery {
    label_column: Option<String>,
    delimiter: Option<char>,
    missing_policy: Option<MissingPolicy>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceBody {
    source: DatasetSource,
}

fn dataset_json(id: &str, ds: &Dataset) -> serde_json::Value {
    json!({
        "id": id,
        "source": ds.source(),
        "n": ds.dims(),
        "n_total": ds.len(),
        "names": ds.names(),
        "labels": ds.labels().is_some(),
    })
}

/// `text/csv` bodies are parsed as an uploaded file (options in the query
/// string); JSON bodies name a server-side path or a synthetic spec.
async fn upload_dataset(
    State(state): State<Arc<AppState>>,
    Query(query): Query<UploadQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let store = Arc::clone(&state);
    let ds = tokio::task::spawn_blocking(move || -> Result<Dataset, SessionError> {
        if is_json {
            let req: SourceBody = serde_json::from_slice(&body)?;
            let ds = store.datasets.read().unwrap().resolve(&req.source)?;
            Ok(Arc::unwrap_or_clone(ds))
        } else {
            let delimiter = match query.delimiter {
                None => b',',
                Some(c) if c.is_ascii() => c as u8,
                Some(c) => {
                    return Err(SessionError::InvalidParameter(format!("delimiter {c:?} is not ASCII")))
                }
            };
            let options = LoadOptions {
                delimiter,
                label_column: query.label_column,
                missing_policy: query.missing_policy.unwrap_or_default(),
            };
            Ok(read_csv(Cursor::new(body), &options, "upload")?)
        }
    })
    .await
    .expect("dataset loading does not panic")?;
    let summary = {
        let id = state.add_dataset(ds);
        let stored = state.datasets.read().unwrap().get(&id).expect("just inserted");
        dataset_json(&id, &stored)
    };
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

async fn list_datasets(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let store = state.datasets.read().unwrap();
    let list: Vec<_> = store
        .ids()
        .map(|id| dataset_json(id, &store.get(id).expect("listed id exists")))
        .collect();
    Json(json!(list))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    dataset: String,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: CreateSession = serde_json::from_slice(&body).map_err(SessionError::from)?;
    let session = state.create_session(&req.dataset)?;
    let body = serde_json::to_string(&session.summary()).expect("state serializes");
    Ok(json_text(StatusCode::CREATED, body))
}

async fn run(state: &AppState, id: &str, cmd: Command) -> Result<Reply, ApiError> {
    let handle = state.handle(id)?;
    let reply = (|| {
        let mut session = handle.session.lock().unwrap();
        let datasets = state.datasets.read().unwrap();
        let before = session.version();
        let reply = session.dispatch(&cmd, &datasets)?;
        if session.version() != before {
            handle.version.send_replace(session.version());
        }
        Ok::<_, SessionError>(reply)
    })()?;
    Ok(reply)
}

async fn session_state(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let handle = state.handle(&id)?;
    let summary = handle.session.lock().unwrap().summary();
    Ok(json_text(StatusCode::OK, serde_json::to_string(&summary).expect("state serializes")))
}

async fn command(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    // Unknown sessions are reported before malformed bodies.
    state.handle(&id)?;
    let text = std::str::from_utf8(&body)
        .map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    let cmd = Command::from_json(text)?;
    let reply = run(&state, &id, cmd).await?;
    Ok(json_text(StatusCode::OK, reply.to_json()))
}

async fn frame(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let reply = run(&state, &id, Command::RequestFrame).await?;
    Ok(json_text(StatusCode::OK, reply.to_json()))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportQuery {
    scope: Option<PcaScope>,
    scaling: Option<PcaScaling>,
}

async fn pca_report(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let options = PcaReportOptions {
        scope: q.scope.unwrap_or_default(),
        scaling: q.scaling.unwrap_or_default(),
    };
    let reply = run(&state, &id, Command::GetPcaReport { options }).await?;
    Ok(json_text(StatusCode::OK, reply.to_json()))
}

async fn stream(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let handle = state.handle(&id)?;
    let interval = state.push_interval;
    Ok(ws.on_upgrade(move |socket| push_frames(socket, handle, interval)))
}

/// Sends the current state, then after every change (coalesced to at most
/// one push per `interval`) a state message followed by a fresh frame.
async fn push_frames(mut socket: WebSocket, handle: Arc<SessionHandle>, interval: Duration) {
    let mut rx = handle.version.subscribe();
    rx.mark_changed();
    loop {
        tokio::select! {
            changed = rx.changed() => {
                if changed.is_err() {
                    return;
                }
            }
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => continue,
            },
        }
        rx.borrow_and_update();
        let messages = {
            let mut session = handle.session.lock().unwrap();
            let state = serde_json::to_string(&session.summary()).expect("state serializes");
            match session.frame() {
                Ok(frame) => vec![state, frame.to_json()],
                Err(SessionError::AssignmentRequired) => vec![state],
                Err(e) => vec![state, json!({ "error": e.to_string() }).to_string()],
            }
        };
        for text in messages {
            if socket.send(Message::Text(text)).await.is_err() {
                return;
            }
        }
        tokio::time::sleep(interval).await;
    }
}
