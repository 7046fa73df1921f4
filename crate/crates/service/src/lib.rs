//! HTTP API over the abstraction engine: sessions hold an initial family and
//! a history of rule applications that can be extended, undone, checked and
//! exported.
//!
//! Sessions live in memory. Requests that mutate one session are serialized
//! by its lock; certification of a step runs on the blocking pool and lands
//! in the history when done.

pub mod error;
pub mod session;
pub mod view;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use ccsabst_core::abstraction::{bounded_lts, certify, list_applicable};
use ccsabst_core::frontend::Path;
use ccsabst_core::logic::{check, classify};
use ccsabst_core::simulation::weakly_simulated_by;
use ccsabst_core::{corpus, DEFAULT_MAX_STATES};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::ApiError;
use session::{build_step, lts_within, Session};
use view::{ApplicableView, EntryView, FamilyView, SessionView};

#[derive(Clone, Copy, Debug)]
pub struct Config {
    /// Bound for state counts, checks and simulation requests.
    pub max_states: usize,
    /// Bound for background step certification.
    pub certify_max_states: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_states: DEFAULT_MAX_STATES, certify_max_states: DEFAULT_MAX_STATES }
    }
}

type Shared = Arc<Mutex<Session>>;

pub struct AppState {
    config: Config,
    sessions: RwLock<HashMap<String, Shared>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: Config) -> Arc<Self> {
        Arc::new(AppState { config, sessions: RwLock::new(HashMap::new()), next_id: AtomicU64::new(1) })
    }

    async fn session(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions.read().await.get(id).cloned().ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/applicable", get(applicable))
        .route("/sessions/{id}/steps", post(add_step))
        .route("/sessions/{id}/steps/last", delete(undo))
        .route("/sessions/{id}/check", post(check_prop))
        .route("/sessions/{id}/simulate", post(simulate))
        .route("/sessions/{id}/export", get(export))
        .route("/corpus", get(corpus_list))
        .route("/corpus/{id}", get(corpus_entry))
        .layer(cors())
        .with_state(state)
}

/// Browsers on a localhost origin may call the API.
fn cors() -> CorsLayer {
    CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin: &HeaderValue, _| {
            let o = origin.as_bytes();
            ["http://localhost", "http://127.0.0.1", "http://[::1]"]
                .iter()
                .any(|p| o.strip_prefix(p.as_bytes()).is_some_and(|rest| rest.is_empty() || rest[0] == b':'))
        }))
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE])
}

pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(config))).await
}

/// Parses a JSON body; malformed input is a 400, not axum's 422.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: format!("worker failed: {e}"),
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateBody {
    ccs: String,
    mu: Option<String>,
    root: Option<String>,
}

async fn create_session(State(st): State<Arc<AppState>>, raw: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req: CreateBody = body(&raw)?;
    let id = format!("s{}", st.next_id.fetch_add(1, Ordering::Relaxed));
    let max = st.config.max_states;
    let session =
        blocking(move || Session::new(id, &req.ccs, req.mu.as_deref(), req.root.as_deref(), max)).await??;
    let out = json!({
        "id": session.id,
        "family": FamilyView::new(&session.initial),
        "stateCount": session.initial_states,
        "truncated": session.initial_states.is_none(),
    });
    st.sessions.write().await.insert(session.id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(out)))
}

async fn get_session(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<SessionView>, ApiError> {
    let s = st.session(&id).await?;
    let s = s.lock().await;
    Ok(Json(SessionView::new(&s)))
}

#[derive(Deserialize)]
struct PathQuery {
    path: Option<String>,
}

async fn applicable(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<PathQuery>,
) -> Result<Json<Value>, ApiError> {
    let s = st.session(&id).await?;
    let text = q.path.ok_or_else(|| ApiError::bad_request("missing `path` query parameter"))?;
    let path: Path = text.parse().map_err(ApiError::bad_request)?;
    let family = s.lock().await.current().clone();
    let found = list_applicable(&family, &path)?;
    let rules: Vec<ApplicableView> = found.iter().map(ApplicableView::from).collect();
    Ok(Json(json!({ "path": path.to_string(), "rules": rules })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct StepBody {
    rule: String,
    target: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, String>,
    #[serde(default)]
    certify: bool,
}

async fn add_step(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    raw: Bytes,
) -> Result<Json<Value>, ApiError> {
    let shared = st.session(&id).await?;
    let req: StepBody = body(&raw)?;
    let params: Vec<(String, String)> = req.params.into_iter().collect();
    let step = build_step(&req.rule, req.target.as_deref(), &params)?;
    let mut s = shared.lock().await;
    let entry = s.apply(step, req.certify, st.config.max_states)?.clone();
    let index = s.history.len();
    if req.certify {
        let (before, after) = s.certification_pair(entry.seq).expect("entry just pushed");
        let bound = st.config.certify_max_states;
        let shared = shared.clone();
        tokio::spawn(async move {
            let res = tokio::task::spawn_blocking(move || {
                certify(bounded_lts(&before, bound).as_ref(), bounded_lts(&after, bound).as_ref())
            })
            .await;
            if let Ok(res) = res {
                shared.lock().await.resolve(entry.seq, res);
            }
        });
    }
    let mut out = serde_json::to_value(EntryView::new(index, &entry)).expect("serializable");
    out["family"] = serde_json::to_value(FamilyView::new(&entry.family)).expect("serializable");
    Ok(Json(out))
}

async fn undo(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<SessionView>, ApiError> {
    let s = st.session(&id).await?;
    let mut s = s.lock().await;
    s.undo()?;
    Ok(Json(SessionView::new(&s)))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CheckBody {
    /// A prop name or an expression such as `Alt({enter}, {exit})`.
    prop: String,
    /// Snapshot to check; defaults to the current one.
    index: Option<usize>,
}

async fn check_prop(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    raw: Bytes,
) -> Result<Json<Value>, ApiError> {
    let shared = st.session(&id).await?;
    let req: CheckBody = body(&raw)?;
    let (family, phi, index) = {
        let s = shared.lock().await;
        let index = req.index.unwrap_or(s.history.len());
        let family = s.snapshot(index).ok_or_else(|| ApiError::not_found(format!("no snapshot {index}")))?.clone();
        let phi = s.props.resolve(&req.prop).map_err(|e| ApiError::parse("prop", e))?;
        (family, phi, index)
    };
    let max = st.config.max_states;
    let (holds, fragment, states) = blocking(move || -> Result<_, ApiError> {
        let lts = lts_within(&family, max)?;
        Ok((check(&lts, &phi)?, classify(&phi)?, lts.num_states()))
    })
    .await??;
    Ok(Json(json!({
        "prop": req.prop,
        "index": index,
        "holds": holds,
        "fragment": fragment.to_string(),
        "stateCount": states,
    })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SimBody {
    from_index: usize,
    to_index: usize,
}

async fn simulate(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    raw: Bytes,
) -> Result<Json<Value>, ApiError> {
    let shared = st.session(&id).await?;
    let req: SimBody = body(&raw)?;
    let (from, to) = {
        let s = shared.lock().await;
        let get = |i: usize| s.snapshot(i).cloned().ok_or_else(|| ApiError::not_found(format!("no snapshot {i}")));
        (get(req.from_index)?, get(req.to_index)?)
    };
    let max = st.config.max_states;
    let (holds, fs, ts) = blocking(move || -> Result<_, ApiError> {
        let (l, r) = (lts_within(&from, max)?, lts_within(&to, max)?);
        Ok((weakly_simulated_by(&l, &r)?.holds, l.num_states(), r.num_states()))
    })
    .await??;
    Ok(Json(json!({
        "fromIndex": req.from_index,
        "toIndex": req.to_index,
        "holds": holds,
        "fromStateCount": fs,
        "toStateCount": ts,
    })))
}

async fn export(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let s = st.session(&id).await?;
    let s = s.lock().await;
    let (ccs, abst) = s.export();
    Ok(Json(json!({ "ccs": ccs, "abst": abst })))
}

async fn corpus_list() -> Json<Value> {
    Json(json!({ "ids": corpus::ids() }))
}

async fn corpus_entry(UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let entry = corpus::load(&id).map_err(|e| ApiError::not_found(e.to_string()))?;
    Ok(Json(json!({ "id": entry.id, "files": entry.files })))
}
