//! HTTP/JSON service over a loaded corpus store and completion index.
//!
//! Reads go straight to the shared immutable store and index. Sessions live
//! in an in-memory registry, each behind its own lock, and expire after a
//! configurable idle period.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use anyhow::Context;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use snipassist_core::completion::{CompletionIndex, Suggestion};
use snipassist_core::corpus::CorpusStore;
use snipassist_core::search::{RetrievalLimits, Retriever, SnippetResult};
use snipassist_core::session::{
    begin_session, find_marker_query, InvocationSession, Origin, Region,
};
use snipassist_core::telemetry::TelemetryLog;
use snipassist_core::{Config, Error, Stats};

pub struct AppState {
    config: Config,
    retriever: Retriever,
    index: CompletionIndex,
    telemetry: TelemetryLog,
    sessions: Mutex<HashMap<String, Arc<Mutex<LiveSession>>>>,
}

struct LiveSession {
    session: InvocationSession,
    document: String,
    last_used: Instant,
}

impl AppState {
    pub fn new(config: Config, store: CorpusStore, index: CompletionIndex) -> anyhow::Result<Self> {
        let telemetry = TelemetryLog::open(&config.telemetry_path).with_context(|| {
            format!("opening telemetry log {}", config.telemetry_path.display())
        })?;
        Ok(AppState {
            retriever: Retriever::new(store, RetrievalLimits::from_config(&config)),
            index,
            telemetry,
            config,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    /// Opens the store and index named by `config`.
    pub fn load(config: Config) -> anyhow::Result<Self> {
        let store = CorpusStore::open(&config.store_dir)
            .with_context(|| format!("loading store from {}", config.store_dir.display()))?;
        let index = CompletionIndex::open(&config.index_path)
            .with_context(|| format!("loading index from {}", config.index_path.display()))?;
        Self::new(config, store, index)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    /// Drops sessions idle for longer than the configured limit.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let idle = Duration::from_secs(self.config.session_idle_secs);
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, live| {
            // A session locked by an in-flight request is in use.
            live.try_lock()
                .map_or(true, |s| now.saturating_duration_since(s.last_used) <= idle)
        });
        before - sessions.len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<LiveSession>>, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("session {id}")).into())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/suggest", get(suggest))
        .route("/v1/snippets", get(snippets))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}/next", post(next_snippet))
        .route("/v1/sessions/{id}/restore", post(restore))
        .route("/v1/sessions/{id}/rate", post(rate))
        .route("/v1/stats", get(stats))
        .with_state(state)
}

/// Binds the configured port and serves until the process is stopped.
pub async fn serve(state: AppState) -> anyhow::Result<()> {
    let addr = std::net::SocketAddr::from(([127, 0, 0, 1], state.config.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    let state = Arc::new(state);

    let sweeper = Arc::clone(&state);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            let dropped = sweeper.expire_idle(Instant::now());
            if dropped > 0 {
                tracing::debug!(dropped, "expired idle sessions");
            }
        }
    });

    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state)).await?;
    Ok(())
}

/// Every failure is answered with a JSON `{"error": …}` body.
pub enum ApiError {
    Engine(Error),
    /// A request axum could not decode, with the status it chose.
    Malformed(StatusCode, String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError::Engine(e)
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::Malformed(r.status(), r.body_text())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::Malformed(r.status(), r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::Engine(e) => {
                let status = match &e {
                    Error::InvalidArgument(_) => StatusCode::BAD_REQUEST,
                    Error::NotFound(_) => StatusCode::NOT_FOUND,
                    Error::State(_) | Error::Conflict(_) => StatusCode::CONFLICT,
                    _ => StatusCode::INTERNAL_SERVER_ERROR,
                };
                if status.is_server_error() {
                    tracing::error!(error = %e, "request failed");
                }
                (status, e.to_string())
            }
            ApiError::Malformed(status, message) => (status, message),
        };
        (status, Json(serde_json::json!({ "error": message }))).into_response()
    }
}

#[derive(Deserialize)]
struct SuggestParams {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

async fn suggest(
    State(state): State<Arc<AppState>>,
    params: Result<Query<SuggestParams>, QueryRejection>,
) -> Result<Json<Vec<Suggestion>>, ApiError> {
    let Query(params) = params?;
    let limit = params.limit.unwrap_or(state.config.suggest_limit_default);
    Ok(Json(state.index.suggest(&params.q, limit)))
}

#[derive(Deserialize)]
struct SnippetParams {
    task: String,
}

async fn snippets(
    State(state): State<Arc<AppState>>,
    params: Result<Query<SnippetParams>, QueryRejection>,
) -> Result<Json<Vec<SnippetResult>>, ApiError> {
    let Query(params) = params?;
    Ok(Json(state.retriever.retrieve_snippets(&params.task)?))
}

#[derive(Deserialize)]
struct CreateSession {
    query: String,
    origin: Origin,
    #[serde(default)]
    document: String,
    region: Option<Region>,
}

#[derive(Serialize)]
struct SessionView {
    id: String,
    document: String,
    index: usize,
    count: usize,
    source_url: Option<String>,
}

#[derive(Serialize)]
struct CycleView {
    document: String,
    index: usize,
    count: usize,
    source_url: Option<String>,
}

#[derive(Serialize)]
struct DocumentView {
    document: String,
}

/// Without an explicit region, a marker session uses the first `?query?`
/// marker and the other origins cover the whole document.
fn default_region(document: &str, origin: Origin) -> Result<Region, Error> {
    match origin {
        Origin::QuestionMarks => find_marker_query(document)
            .map(|(_, region)| region)
            .ok_or_else(|| Error::InvalidArgument("document has no ?query? marker".into())),
        Origin::ContentAssist | Origin::Selection => Ok(Region {
            start: 0,
            length: document.chars().count(),
        }),
    }
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<Json<SessionView>, ApiError> {
    let Json(body) = body?;
    let region = match body.region {
        Some(region) => region,
        None => default_region(&body.document, body.origin)?,
    };
    let (session, edit) = begin_session(
        &state.retriever,
        &body.document,
        &body.query,
        body.origin,
        region,
        &state.config.comment_leader,
    )?;
    let document = match edit {
        Some(edit) => edit.apply(&body.document)?,
        None => body.document,
    };
    let view = SessionView {
        id: session.id().to_string(),
        document: document.clone(),
        index: session.index(),
        count: session.count(),
        source_url: session.current().map(|s| s.source_url.clone()),
    };
    state.expire_idle(Instant::now());
    state.sessions.lock().unwrap().insert(
        view.id.clone(),
        Arc::new(Mutex::new(LiveSession {
            session,
            document,
            last_used: Instant::now(),
        })),
    );
    Ok(Json(view))
}

async fn next_snippet(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<CycleView>, ApiError> {
    let entry = state.session(&id)?;
    let live = &mut *entry.lock().unwrap();
    live.last_used = Instant::now();
    let edit = live.session.next_snippet(&live.document)?;
    live.document = edit.apply(&live.document)?;
    Ok(Json(CycleView {
        document: live.document.clone(),
        index: live.session.index(),
        count: live.session.count(),
        source_url: live.session.current().map(|s| s.source_url.clone()),
    }))
}

async fn restore(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<DocumentView>, ApiError> {
    let entry = state.session(&id)?;
    let live = &mut *entry.lock().unwrap();
    live.last_used = Instant::now();
    let edit = live.session.restore(&live.document)?;
    live.document = edit.apply(&live.document)?;
    Ok(Json(DocumentView {
        document: live.document.clone(),
    }))
}

#[derive(Deserialize)]
struct RateBody {
    helpful: bool,
}

async fn rate(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<RateBody>, JsonRejection>,
) -> Result<StatusCode, ApiError> {
    let Json(body) = body?;
    let entry = state.session(&id)?;
    let live = &mut *entry.lock().unwrap();
    live.last_used = Instant::now();
    live.session.rate(body.helpful, &state.telemetry)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn stats(State(state): State<Arc<AppState>>) -> Json<Stats> {
    Json(snipassist_core::stats(
        state.retriever.store(),
        &state.index,
    ))
}
