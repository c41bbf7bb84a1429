//! HTTP v1 routes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use gesto_core::artwork::MAX_AUTHOR_BYTES;
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;

use crate::store::{ArtworkRecord, Store, StoreError};

pub const MAX_PAYLOAD_BYTES: usize = 16 * 1024 * 1024;
pub const DEFAULT_PAGE: usize = 20;
pub const MAX_PAGE: usize = 100;
pub const CHECKSUM_HEADER: &str = "x-gesto-crc32";

#[derive(Clone, Debug)]
pub struct Session {
    pub author: String,
    pub issued_at: i64,
}

#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
    sessions: Arc<Mutex<HashMap<String, Session>>>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        Self { store: Arc::new(store), sessions: Arc::default() }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    fn session(&self, headers: &HeaderMap) -> Option<Session> {
        let token = headers
            .get(header::AUTHORIZATION)?
            .to_str()
            .ok()?
            .strip_prefix("Bearer ")?
            .trim();
        self.sessions.lock().unwrap().get(token).cloned()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/sessions", post(create_session))
        .route("/v1/artworks", post(upload).get(list))
        .route("/v1/artworks/{id}", get(fetch).delete(remove))
        .layer(DefaultBodyLimit::max(MAX_PAYLOAD_BYTES))
        .layer(middleware::from_fn(log_request))
        .with_state(state)
}

async fn log_request(req: Request, next: Next) -> Response {
    let method = req.method().clone();
    let path = req.uri().path().to_owned();
    let started = Instant::now();
    let response = next.run(req).await;
    tracing::info!(
        %method,
        %path,
        status = response.status().as_u16(),
        micros = started.elapsed().as_micros() as u64,
        "request"
    );
    response
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::Decode(_) => StatusCode::BAD_REQUEST,
            StoreError::Conflict(_) => StatusCode::CONFLICT,
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            StoreError::Io(_) | StoreError::Crashed => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

fn unauthorized() -> ApiError {
    ApiError(StatusCode::UNAUTHORIZED, "missing or unknown bearer token".into())
}

fn parse_id(raw: &str) -> Result<Uuid, ApiError> {
    Uuid::parse_str(raw).map_err(|_| ApiError(StatusCode::NOT_FOUND, format!("artwork {raw} not found")))
}

/// Runs blocking store work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "artworks": state.store.len() }))
}

#[derive(Deserialize)]
struct SessionRequest {
    author: String,
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<SessionRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<serde_json::Value>), ApiError> {
    let Json(req) = body.map_err(|e| bad_request(e.body_text()))?;
    if req.author.is_empty() {
        return Err(bad_request("author must be non-empty"));
    }
    if req.author.len() > MAX_AUTHOR_BYTES {
        return Err(bad_request(format!("author exceeds {MAX_AUTHOR_BYTES} bytes")));
    }
    let issued_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs() as i64);
    let mut sessions = state.sessions.lock().unwrap();
    let token = loop {
        let candidate = format!("{:032x}", rand::random::<u128>());
        if !sessions.contains_key(&candidate) {
            break candidate;
        }
    };
    sessions.insert(token.clone(), Session { author: req.author.clone(), issued_at });
    Ok((StatusCode::CREATED, Json(json!({ "token": token, "author": req.author, "issued_at": issued_at }))))
}

async fn upload(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<(StatusCode, Json<serde_json::Value>), ApiError> {
    state.session(&headers).ok_or_else(unauthorized)?;
    let store = state.store.clone();
    let record = blocking(move || store.put(&body)).await??;
    Ok((StatusCode::CREATED, Json(json!({ "artwork_id": record.artwork_id }))))
}

async fn fetch(State(state): State<AppState>, Path(raw): Path<String>) -> Result<Response, ApiError> {
    let id = parse_id(&raw)?;
    let store = state.store.clone();
    let (record, bytes) = blocking(move || store.get(id)).await??;
    let crc = HeaderValue::from_str(&format!("{:08x}", record.checksum)).expect("hex is a valid header");
    Ok((
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/octet-stream")), (header::HeaderName::from_static(CHECKSUM_HEADER), crc)],
        bytes,
    )
        .into_response())
}

async fn remove(State(state): State<AppState>, headers: HeaderMap, Path(raw): Path<String>) -> Result<StatusCode, ApiError> {
    let session = state.session(&headers).ok_or_else(unauthorized)?;
    let id = parse_id(&raw)?;
    let record = state.store.record(id).ok_or(StoreError::NotFound(id))?;
    if record.author != session.author {
        return Err(ApiError(StatusCode::FORBIDDEN, format!("artwork {id} belongs to another author")));
    }
    let store = state.store.clone();
    blocking(move || store.delete(id)).await??;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
struct ListQuery {
    author: Option<String>,
    limit: Option<String>,
    after: Option<String>,
}

#[derive(Serialize)]
struct ListPage {
    items: Vec<ArtworkRecord>,
    next: Option<String>,
}

fn encode_cursor(r: &ArtworkRecord) -> String {
    URL_SAFE_NO_PAD.encode(format!("{}:{}", r.created_at, r.artwork_id))
}

fn decode_cursor(raw: &str) -> Option<(i64, Uuid)> {
    let text = String::from_utf8(URL_SAFE_NO_PAD.decode(raw).ok()?).ok()?;
    let (created, id) = text.split_once(':')?;
    Some((created.parse().ok()?, Uuid::parse_str(id).ok()?))
}

async fn list(State(state): State<AppState>, query: Result<Query<ListQuery>, axum::extract::rejection::QueryRejection>) -> Result<Json<ListPage>, ApiError> {
    let Query(q) = query.map_err(|e| bad_request(e.body_text()))?;
    let limit = match q.limit.as_deref() {
        None => DEFAULT_PAGE,
        Some(s) => match s.parse::<usize>() {
            Ok(n) if (1..=MAX_PAGE).contains(&n) => n,
            _ => return Err(bad_request(format!("limit must be an integer in [1, {MAX_PAGE}]"))),
        },
    };
    let after = match q.after.as_deref() {
        None => None,
        Some(raw) => Some(decode_cursor(raw).ok_or_else(|| bad_request("malformed cursor"))?),
    };
    let mut items: Vec<ArtworkRecord> = state
        .store
        .records()
        .into_iter()
        .filter(|r| q.author.as_ref().is_none_or(|a| &r.author == a))
        .filter(|r| after.is_none_or(|(c, id)| r.order_key() > (std::cmp::Reverse(c), id)))
        .take(limit + 1)
        .collect();
    let next = if items.len() > limit {
        items.truncate(limit);
        items.last().map(encode_cursor)
    } else {
        None
    };
    Ok(Json(ListPage { items, next }))
}
