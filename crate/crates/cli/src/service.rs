//! HTTP JSON backend for the diagram editor: one diagram per process, saved
//! to a working file after every mutation.
//!
//! Mutations run one at a time under a lock and bump a generation counter.
//! Read-only work (censuses, search) runs on a snapshot and answers 409 if a
//! mutation landed while it was running. A client may also pass the
//! generation it last saw in `x-generation`; a stale value gets 409 before
//! anything is changed.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;

use linkcensus::census::{census_with, knot_records, link_records, local_search_minimize_with, with_workers, CensusKind, Objective, SearchOptions};
use linkcensus::{CrossingKey, Diagram, Error, Point};

use crate::commands::canonical;

pub const GENERATION_HEADER: &str = "x-generation";

pub struct Session {
    diagram: Mutex<Option<Diagram>>,
    generation: AtomicU64,
    workfile: PathBuf,
}

impl Session {
    /// Starts from the working file when it exists.
    pub fn open(workfile: PathBuf) -> anyhow::Result<Arc<Session>> {
        let diagram = if workfile.exists() { Some(crate::commands::load(&workfile)?) } else { None };
        Ok(Arc::new(Session { diagram: Mutex::new(diagram), generation: AtomicU64::new(0), workfile }))
    }

    pub fn generation(&self) -> u64 {
        self.generation.load(Ordering::SeqCst)
    }

    async fn snapshot(&self) -> Result<(Diagram, u64), ApiError> {
        let guard = self.diagram.lock().await;
        let d = guard.clone().ok_or(ApiError::NoDiagram)?;
        Ok((d, self.generation()))
    }

    /// Apply `f` to the current diagram (or `None`) and install the result,
    /// unless the generation no longer equals `expect`.
    async fn mutate(&self, expect: Option<u64>, f: impl FnOnce(Option<&Diagram>) -> Result<(Diagram, Vec<String>), ApiError>) -> Result<Value, ApiError> {
        let mut guard = self.diagram.lock().await;
        if expect.is_some_and(|g| g != self.generation()) {
            return Err(ApiError::Superseded);
        }
        let (next, warnings) = f(guard.as_ref())?;
        let text = next.to_json();
        let tmp = self.workfile.with_extension("tmp");
        std::fs::write(&tmp, &text).and_then(|_| std::fs::rename(&tmp, &self.workfile)).map_err(|e| ApiError::Io(e.to_string()))?;
        *guard = Some(next);
        let generation = self.generation.fetch_add(1, Ordering::SeqCst) + 1;
        let diagram: Value = serde_json::from_str(&text).expect("diagram json");
        Ok(json!({ "generation": generation, "warnings": warnings, "diagram": diagram }))
    }
}

fn expected(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    headers
        .get(GENERATION_HEADER)
        .map(|v| v.to_str().ok().and_then(|s| s.parse().ok()).ok_or_else(|| ApiError::BadRequest("bad generation header".into())))
        .transpose()
}

fn ok(v: Value) -> Response {
    json_response(StatusCode::OK, &v)
}

#[derive(Debug)]
pub enum ApiError {
    NoDiagram,
    BadRequest(String),
    Superseded,
    Io(String),
    Core(Error),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError::Core(e)
    }
}

fn json_response(status: StatusCode, v: &impl serde::Serialize) -> Response {
    text_response(status, canonical(v))
}

fn text_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, message, extra) = match self {
            ApiError::NoDiagram => (StatusCode::NOT_FOUND, "no_diagram", "no diagram loaded".to_string(), None),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "bad_request", m, None),
            ApiError::Superseded => (StatusCode::CONFLICT, "superseded", "the diagram changed while this request was pending".to_string(), None),
            ApiError::Io(m) => (StatusCode::INTERNAL_SERVER_ERROR, "io", m, None),
            ApiError::Core(e) => {
                let message = e.to_string();
                match e {
                    Error::UnknownCrossing(_) => (StatusCode::NOT_FOUND, "unknown_crossing", message, None),
                    Error::Degenerate(v) => {
                        (StatusCode::UNPROCESSABLE_ENTITY, "degenerate", message, Some(serde_json::to_value(v).expect("serializable")))
                    }
                    Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::Format(_) | Error::Json(_) => {
                        (StatusCode::UNPROCESSABLE_ENTITY, "invalid", message, None)
                    }
                    Error::Cancelled => (StatusCode::CONFLICT, "superseded", message, None),
                    _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal", message, None),
                }
            }
        };
        let mut body = json!({ "error": kind, "message": message });
        if let Some(v) = extra {
            body["violations"] = v;
        }
        json_response(status, &body)
    }
}

type Shared = State<Arc<Session>>;

async fn get_diagram(State(s): Shared) -> Result<Response, ApiError> {
    let (d, _) = s.snapshot().await?;
    Ok(text_response(StatusCode::OK, d.to_json()))
}

async fn put_diagram(State(s): Shared, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    s.mutate(expected(&headers)?, |_| Ok(Diagram::from_json(&body)?)).await.map(ok)
}

#[derive(Deserialize)]
struct FlipBody {
    key: CrossingKey,
}

async fn flip(State(s): Shared, headers: HeaderMap, Json(b): Json<FlipBody>) -> Result<Response, ApiError> {
    s.mutate(expected(&headers)?, |d| Ok((d.ok_or(ApiError::NoDiagram)?.flip_crossing(&b.key)?, Vec::new()))).await.map(ok)
}

#[derive(Deserialize)]
struct MoveBody {
    id: usize,
    x: Value,
    y: Value,
}

fn coord(v: &Value) -> Result<String, ApiError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(ApiError::BadRequest(format!("bad coordinate {other}"))),
    }
}

async fn move_vertex(State(s): Shared, headers: HeaderMap, Json(b): Json<MoveBody>) -> Result<Response, ApiError> {
    let p = Point::parse(&coord(&b.x)?, &coord(&b.y)?)?;
    s.mutate(expected(&headers)?, |d| Ok(d.ok_or(ApiError::NoDiagram)?.move_vertex(b.id, p)?)).await.map(ok)
}

#[derive(Deserialize)]
struct KindQuery {
    kind: Option<String>,
}

/// Run blocking work on a snapshot; 409 if the diagram moved on meanwhile.
async fn on_snapshot<T: Send + 'static>(s: &Arc<Session>, f: impl FnOnce(Diagram, u64) -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    let (d, generation) = s.snapshot().await?;
    let out = tokio::task::spawn_blocking(move || with_workers(|| f(d, generation)))
        .await
        .map_err(|e| ApiError::Io(e.to_string()))??;
    if s.generation() != generation {
        return Err(ApiError::Superseded);
    }
    Ok(out)
}

async fn get_census(State(s): Shared, Query(q): Query<KindQuery>) -> Result<Response, ApiError> {
    let kind: CensusKind = q.kind.as_deref().unwrap_or("both").parse().map_err(|e: Error| ApiError::BadRequest(e.to_string()))?;
    let watcher = s.clone();
    let report = on_snapshot(&s, move |d, generation| Ok(census_with(&d, kind, &|| watcher.generation() != generation)?)).await?;
    Ok(text_response(StatusCode::OK, report.to_json()))
}

async fn get_links(State(s): Shared) -> Result<Response, ApiError> {
    let records = on_snapshot(&s, |d, _| Ok(link_records(&d)?)).await?;
    Ok(json_response(StatusCode::OK, &records))
}

async fn get_knots(State(s): Shared) -> Result<Response, ApiError> {
    let records = on_snapshot(&s, |d, _| Ok(knot_records(&d)?)).await?;
    Ok(json_response(StatusCode::OK, &records))
}

#[derive(Deserialize)]
struct SearchBody {
    objective: Option<Objective>,
    budget: Option<i64>,
    seed: Option<u64>,
    plateau: Option<u64>,
    anneal: Option<bool>,
}

/// Search from the current diagram and install the best one found.
async fn search(State(s): Shared, headers: HeaderMap, Json(b): Json<SearchBody>) -> Result<Response, ApiError> {
    let def = SearchOptions::default();
    let opts = SearchOptions {
        objective: b.objective.unwrap_or(def.objective),
        budget: b.budget.unwrap_or(def.budget),
        seed: b.seed.unwrap_or(def.seed),
        plateau: b.plateau.unwrap_or(def.plateau),
        anneal: b.anneal.unwrap_or(def.anneal),
        ..def
    };
    if let Some(g) = expected(&headers)? {
        if g != s.generation() {
            return Err(ApiError::Superseded);
        }
    }
    let watcher = s.clone();
    let o = opts.clone();
    let (result, generation) = on_snapshot(&s, move |d, generation| {
        let cancelled = move || watcher.generation() != generation;
        Ok((local_search_minimize_with(&d, &o, &cancelled)?, generation))
    })
    .await?;
    let summary = json!({
        "options": opts,
        "initial_score": result.initial_score,
        "best_score": result.best_score,
        "steps": result.trace.len(),
    });
    let mut body = s.mutate(Some(generation), |_| Ok((result.best, Vec::new()))).await?;
    body["search"] = summary;
    Ok(ok(body))
}

pub fn router(session: Arc<Session>) -> Router {
    Router::new()
        .route("/diagram", get(get_diagram).put(put_diagram))
        .route("/flip", post(flip))
        .route("/move-vertex", post(move_vertex))
        .route("/census", get(get_census))
        .route("/links", get(get_links))
        .route("/knots", get(get_knots))
        .route("/search", post(search))
        .with_state(session)
}

pub async fn serve(port: u16, session: Arc<Session>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(session)).with_graceful_shutdown(async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}
