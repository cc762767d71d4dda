//! HTTP completion service for predictive editors.
//!
//! Grammars are loaded once from a directory (`<id>.codeco`). Each session
//! keeps its token history; undo replays the history without its last token
//! from a fresh state.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::grammar::Grammar;
use crate::notation::{load_grammar, LoadError};
use crate::parser::{antecedent_json, features_json, ParseState, TokenOption};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("grammar directory {0}: {1}")]
    Directory(String, std::io::Error),
    #[error("grammar {0}: {1}")]
    Grammar(String, String),
    #[error("no grammars found in {0}")]
    Empty(String),
    #[error("cannot listen on {0}: {1}")]
    Bind(SocketAddr, std::io::Error),
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads every `*.codeco` file of a directory, keyed by file stem.
pub fn load_grammar_dir(dir: &Path) -> Result<BTreeMap<String, Arc<Grammar>>, ServiceError> {
    let shown = dir.display().to_string();
    let entries = std::fs::read_dir(dir).map_err(|e| ServiceError::Directory(shown.clone(), e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| ServiceError::Directory(shown.clone(), e))?.path();
        if path.extension().is_none_or(|e| e != "codeco") {
            continue;
        }
        let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).map_err(|e| ServiceError::Directory(path.display().to_string(), e))?;
        let g = load_grammar(&text).map_err(|e| {
            let msg = match e {
                LoadError::Syntax(d) => d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
                LoadError::Invalid(d) => d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
            };
            ServiceError::Grammar(id.clone(), msg)
        })?;
        out.insert(id, Arc::new(g));
    }
    if out.is_empty() {
        return Err(ServiceError::Empty(shown));
    }
    Ok(out)
}

struct Session {
    grammar_id: String,
    start: String,
    history: Vec<String>,
    state: ParseState,
    last_access: Instant,
}

pub struct AppState {
    grammars: BTreeMap<String, Arc<Grammar>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    idle_timeout: Duration,
}

impl AppState {
    pub fn new(grammars: BTreeMap<String, Arc<Grammar>>, idle_timeout: Duration) -> Arc<Self> {
        Arc::new(AppState { grammars, sessions: Mutex::new(HashMap::new()), idle_timeout })
    }

    /// Drops sessions idle for longer than the timeout. Returns how many.
    pub fn evict_expired(&self) -> usize {
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let before = sessions.len();
        sessions.retain(|_, s| match s.try_lock() {
            Ok(s) => s.last_access.elapsed() <= self.idle_timeout,
            Err(_) => true,
        });
        before - sessions.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let s = sessions.get(id).cloned().ok_or(ApiError::UnknownSession)?;
        let expired = s.lock().expect("session poisoned").last_access.elapsed() > self.idle_timeout;
        if expired {
            sessions.remove(id);
            return Err(ApiError::Expired);
        }
        Ok(s)
    }
}

#[derive(Debug)]
enum ApiError {
    UnknownSession,
    UnknownGrammar(String),
    UnknownStart(String),
    Expired,
    EmptyHistory,
    Malformed(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::UnknownSession => (StatusCode::NOT_FOUND, "unknown session".to_string()),
            ApiError::UnknownGrammar(g) => (StatusCode::NOT_FOUND, format!("unknown grammar `{g}`")),
            ApiError::UnknownStart(s) => (StatusCode::BAD_REQUEST, format!("unknown start category `{s}`")),
            ApiError::Expired => (StatusCode::GONE, "session expired".to_string()),
            ApiError::EmptyHistory => (StatusCode::CONFLICT, "no token to remove".to_string()),
            ApiError::Malformed(m) => (StatusCode::BAD_REQUEST, m),
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::Malformed(r.body_text())
    }
}

/// Wire form of a token option.
pub fn option_json(o: &TokenOption) -> Value {
    json!({ "token": o.token, "category": o.category.to_string(), "features": features_json(&o.features) })
}

fn state_json(st: &ParseState) -> Value {
    json!({
        "tokens": st.tokens(),
        "options": st.next_tokens().iter().map(option_json).collect::<Vec<_>>(),
        "antecedents": st.accessible_antecedents().iter().map(antecedent_json).collect::<Vec<_>>(),
        "complete": st.is_complete(),
    })
}

#[derive(Deserialize)]
struct CreateRequest {
    grammar_id: String,
    start: Option<String>,
}

#[derive(Deserialize)]
struct TokenRequest {
    token: String,
}

#[derive(Serialize)]
struct GrammarInfo {
    id: String,
    start: String,
    rules: usize,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({ "status": "ok" })) }))
        .route("/grammars", get(list_grammars))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/tokens", post(push_token))
        .route("/sessions/{id}/tokens/last", delete(pop_token))
        .route("/sessions/{id}/tree", get(get_tree))
        .with_state(state)
}

async fn list_grammars(State(app): State<Arc<AppState>>) -> Json<Vec<GrammarInfo>> {
    Json(
        app.grammars
            .iter()
            .map(|(id, g)| GrammarInfo { id: id.clone(), start: g.start().to_string(), rules: g.rule_count() })
            .collect(),
    )
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(req) = body?;
    let g = app.grammars.get(&req.grammar_id).ok_or_else(|| ApiError::UnknownGrammar(req.grammar_id.clone()))?;
    let start = req.start.unwrap_or_else(|| g.start().to_string());
    let st = ParseState::new(Arc::clone(g), &start).map_err(|_| ApiError::UnknownStart(start.clone()))?;
    let id = uuid::Uuid::new_v4().to_string();
    let mut body = state_json(&st);
    body["session_id"] = json!(id);
    body["grammar_id"] = json!(req.grammar_id);
    let session = Session { grammar_id: req.grammar_id, start, history: Vec::new(), state: st, last_access: Instant::now() };
    app.sessions.lock().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok(Json(body))
}

async fn push_token(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<TokenRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(req) = body?;
    if req.token.is_empty() {
        return Err(ApiError::Malformed("token must not be empty".into()));
    }
    let session = app.session(&id)?;
    let mut s = session.lock().expect("session poisoned");
    s.last_access = Instant::now();
    let accepted = match s.state.feed_token(&req.token) {
        Ok(next) => {
            s.state = next;
            s.history.push(req.token);
            true
        }
        Err(_) => false,
    };
    let mut body = state_json(&s.state);
    body["accepted"] = json!(accepted);
    Ok(Json(body))
}

async fn pop_token(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().expect("session poisoned");
    s.last_access = Instant::now();
    if s.history.is_empty() {
        return Err(ApiError::EmptyHistory);
    }
    let mut history = s.history.clone();
    history.pop();
    let g = Arc::clone(&app.grammars[&s.grammar_id]);
    let mut st = ParseState::new(g, &s.start).map_err(|_| ApiError::UnknownStart(s.start.clone()))?;
    for t in &history {
        st = st.feed_token(t).expect("a prefix of an accepted history is accepted");
    }
    s.state = st;
    s.history = history;
    let mut body = state_json(&s.state);
    body["accepted"] = json!(true);
    Ok(Json(body))
}

async fn get_tree(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().expect("session poisoned");
    s.last_access = Instant::now();
    let trees: Vec<Value> = s.state.extract_trees().iter().map(|t| t.to_json()).collect();
    Ok(Json(json!({ "tokens": s.state.tokens(), "complete": s.state.is_complete(), "trees": trees })))
}

/// Serves until ctrl-c.
pub async fn serve(dir: &Path, port: u16, idle_timeout: Duration) -> Result<(), ServiceError> {
    let app = AppState::new(load_grammar_dir(dir)?, idle_timeout);
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| ServiceError::Bind(addr, e))?;
    let sweeper = Arc::clone(&app);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired();
        }
    });
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
