//! HTTP session service. Each session runs its own simulation, advanced to
//! the service clock whenever it is touched; requests to one session are
//! serialized, different sessions proceed independently.

use std::collections::HashMap;
use std::io;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use wayfarer_core::intent::Backend;
use wayfarer_core::locomotion::{
    write_trace_jsonl, CommandRequest, CommandResponse, Session, SessionConfig, SessionError,
};
use wayfarer_core::world::{parse_scene, visible_objects, Pose, SceneObject, TownLayout, Vec3};
use wayfarer_core::Technique;

use crate::BackendKind;

/// Monotonic time source in seconds.
pub trait Clock: Send + Sync {
    fn now(&self) -> f64;
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Hand-driven clock for tests.
#[derive(Default)]
pub struct ManualClock {
    t: Mutex<f64>,
}

impl ManualClock {
    pub fn advance(&self, dt: f64) {
        *self.t.lock().unwrap() += dt.max(0.0);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> f64 {
        *self.t.lock().unwrap()
    }
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("session `{0}` not found")]
    SessionNotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn kind(&self) -> &'static str {
        match self {
            ApiError::SessionNotFound(_) => "session_not_found",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::Backend(_) => "backend_unavailable",
            ApiError::Internal(_) => "internal",
        }
    }

    fn status(&self) -> StatusCode {
        match self {
            ApiError::SessionNotFound(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Backend(_) => StatusCode::SERVICE_UNAVAILABLE,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError::BadRequest(e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.kind(), "message": self.to_string() }))).into_response()
    }
}

struct LiveSession {
    session: Session,
    backend: Arc<dyn Backend>,
    backend_kind: BackendKind,
    created_at_ms: u128,
    /// Clock reading at simulated time zero.
    epoch: f64,
}

impl LiveSession {
    fn sync(&mut self, now: f64) {
        self.session.advance_to(now - self.epoch);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingView {
    pub target: Vec3,
    pub execute_at: f64,
    pub remaining_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub id: String,
    pub technique: Technique,
    pub backend: BackendKind,
    pub created_at_ms: u128,
    pub t: f64,
    pub pose: Pose,
    pub moving: bool,
    pub heading: f64,
    pub speed: f64,
    pub level_index: usize,
    pub pending: Option<PendingView>,
    pub next_target_index: usize,
    pub target_count: usize,
    pub current_target: Option<Vec3>,
    pub done: bool,
    pub visible_objects: Vec<SceneObject>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    /// Inline scene; the service default is used when absent.
    #[serde(default)]
    pub scene: Option<serde_json::Value>,
    pub technique: Technique,
    #[serde(default)]
    pub backend: Option<BackendKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

pub struct ServiceConfig {
    pub scene: Arc<TownLayout>,
    pub backend: BackendKind,
    pub session: SessionConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { scene: Arc::new(TownLayout::default_scene()), backend: BackendKind::Mock, session: SessionConfig::default() }
    }
}

struct Inner {
    sessions: RwLock<HashMap<String, Arc<Mutex<LiveSession>>>>,
    cfg: ServiceConfig,
    clock: Arc<dyn Clock>,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

fn lock(s: &Mutex<LiveSession>) -> MutexGuard<'_, LiveSession> {
    s.lock().unwrap_or_else(|e| e.into_inner())
}

impl AppState {
    pub fn new(cfg: ServiceConfig, clock: Arc<dyn Clock>) -> Self {
        Self { inner: Arc::new(Inner { sessions: RwLock::new(HashMap::new()), cfg, clock }) }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<LiveSession>>, ApiError> {
        self.inner
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::SessionNotFound(id.to_string()))
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn create_session(&self, req: CreateSession) -> Result<Created, ApiError> {
        let scene = match req.scene {
            Some(v) => Arc::new(parse_scene(&v.to_string()).map_err(|e| ApiError::BadRequest(e.to_string()))?),
            None => self.inner.cfg.scene.clone(),
        };
        let backend_kind = req.backend.unwrap_or(self.inner.cfg.backend);
        let backend = backend_kind.build().map_err(|e| ApiError::Backend(e.to_string()))?;
        let id = uuid::Uuid::new_v4().to_string();
        let created_at_ms = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
        let live = LiveSession {
            session: Session::new(scene, req.technique, self.inner.cfg.session.clone()),
            backend,
            backend_kind,
            created_at_ms,
            epoch: self.inner.clock.now(),
        };
        self.inner
            .sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(id.clone(), Arc::new(Mutex::new(live)));
        log::info!("session {id} created ({}, {backend_kind})", req.technique);
        Ok(Created { id })
    }

    pub fn delete_session(&self, id: &str) -> Result<(), ApiError> {
        self.inner
            .sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| ApiError::SessionNotFound(id.to_string()))
    }

    fn snapshot(id: &str, live: &LiveSession) -> StateSnapshot {
        let s = live.session.state();
        let layout = live.session.layout();
        let cfg = live.session.config();
        StateSnapshot {
            id: id.to_string(),
            technique: s.technique,
            backend: live.backend_kind,
            created_at_ms: live.created_at_ms,
            t: s.t,
            pose: s.pose,
            moving: s.steering.moving,
            heading: s.steering.heading,
            speed: s.steering.speed(&cfg.steering),
            level_index: s.steering.level_index,
            pending: s.pending.map(|p| PendingView {
                target: p.target,
                execute_at: p.execute_at,
                remaining_s: (p.execute_at - s.t).max(0.0),
            }),
            next_target_index: s.next_target_index,
            target_count: layout.targets.len(),
            current_target: layout.targets.get(s.next_target_index).copied(),
            done: s.done,
            visible_objects: visible_objects(layout, &s.pose, &cfg.resolver.visibility).into_iter().cloned().collect(),
        }
    }

    pub fn state(&self, id: &str) -> Result<StateSnapshot, ApiError> {
        let s = self.session(id)?;
        let mut live = lock(&s);
        live.sync(self.inner.clock.now());
        Ok(Self::snapshot(id, &live))
    }

    pub fn scene(&self, id: &str) -> Result<TownLayout, ApiError> {
        let s = self.session(id)?;
        let live = lock(&s);
        Ok((**live.session.layout()).clone())
    }

    pub fn reset(&self, id: &str) -> Result<StateSnapshot, ApiError> {
        let s = self.session(id)?;
        let mut live = lock(&s);
        live.session.reset();
        live.epoch = self.inner.clock.now();
        Ok(Self::snapshot(id, &live))
    }

    /// Routes one command to the session's technique at the current time.
    /// Blocks while a remote backend is queried.
    pub fn handle_command(&self, id: &str, req: &CommandRequest) -> Result<CommandResponse, ApiError> {
        let s = self.session(id)?;
        let mut live = lock(&s);
        live.sync(self.inner.clock.now());
        let backend = live.backend.clone();
        Ok(live.session.command(req, backend.as_ref())?)
    }

    pub fn trace_jsonl(&self, id: &str) -> Result<String, ApiError> {
        let s = self.session(id)?;
        let mut live = lock(&s);
        live.sync(self.inner.clock.now());
        let mut buf = Vec::new();
        write_trace_jsonl(live.session.trace(), &mut buf).map_err(|e| ApiError::Internal(e.to_string()))?;
        String::from_utf8(buf).map_err(|e| ApiError::Internal(e.to_string()))
    }
}

async fn health() -> &'static str {
    "ok"
}

async fn create_session(
    State(app): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(req) = body?;
    Ok((StatusCode::CREATED, Json(app.create_session(req)?)))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    app.delete_session(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateSnapshot>, ApiError> {
    Ok(Json(app.state(&id)?))
}

async fn get_scene(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<TownLayout>, ApiError> {
    Ok(Json(app.scene(&id)?))
}

async fn post_reset(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateSnapshot>, ApiError> {
    Ok(Json(app.reset(&id)?))
}

async fn post_command(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<CommandRequest>, JsonRejection>,
) -> Result<Json<CommandResponse>, ApiError> {
    let Json(req) = body?;
    let resp = tokio::task::spawn_blocking(move || app.handle_command(&id, &req))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(resp))
}

async fn get_trace(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let body = app.trace_jsonl(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", delete(delete_session))
        .route("/api/sessions/{id}/state", get(get_state))
        .route("/api/sessions/{id}/command", post(post_command))
        .route("/api/sessions/{id}/scene", get(get_scene))
        .route("/api/sessions/{id}/reset", post(post_reset))
        .route("/api/sessions/{id}/trace", get(get_trace))
        .with_state(app)
}

/// Serves until interrupted.
pub async fn serve(addr: SocketAddr, app: AppState) -> io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
