//! Session-scoped HTTP API over the solver engine.
//!
//! Every session stores only its policy and move history. The game state is
//! rebuilt by replay from the shared, read-only matrix on each request, which
//! keeps sessions tiny and makes responses a pure function of
//! (history, policy, word lists).

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::services::ServeDir;

use tares_core::fds::FdsCache;
use tares_core::feedback::{decode_code, encode_code, CodeIndex};
use tares_core::strategy::{bucket_histogram, rank_guesses_with};
use tares_core::{ColorCode, GameError, GameSetup, GameState, Mode, Policy, ScoreMode};

pub const DEFAULT_LIMIT: usize = 10;
pub const MAX_LIMIT: usize = 100;
pub const VIABLE_SAMPLE: usize = 20;
pub const DEFAULT_IDLE: Duration = Duration::from_secs(24 * 60 * 60);
pub const DEFAULT_MAX_SESSIONS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Config {
    pub idle_expiry: Duration,
    pub max_sessions: usize,
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            idle_expiry: DEFAULT_IDLE,
            max_sessions: DEFAULT_MAX_SESSIONS,
            static_dir: None,
        }
    }
}

struct Session {
    mode: Mode,
    policy: Policy,
    history: Vec<(u32, CodeIndex)>,
    solved: bool,
    last_used: Instant,
}

type RoundOneKey = (Mode, String);

pub struct AppState {
    setup: Arc<GameSetup>,
    config: Config,
    sessions: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
    round_one: Mutex<HashMap<RoundOneKey, Arc<Vec<SuggestionView>>>>,
}

impl AppState {
    pub fn new(setup: Arc<GameSetup>, config: Config) -> Arc<AppState> {
        Arc::new(AppState {
            setup,
            config,
            sessions: Mutex::new(HashMap::new()),
            round_one: Mutex::new(HashMap::new()),
        })
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn sweep(&self) {
        let idle = self.config.idle_expiry;
        self.sessions.lock().unwrap().retain(|_, s| match s.try_lock() {
            Ok(s) => s.last_used.elapsed() < idle,
            Err(_) => true,
        });
    }

    fn session(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
        self.sweep();
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session).delete(delete_session))
        .route("/api/sessions/{id}/guesses", post(submit_guess))
        .route("/api/sessions/{id}/undo", post(undo));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    api.with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuggestionView {
    pub word: String,
    pub score: f64,
    pub in_viable: bool,
    pub expected_gy: f64,
    /// Size of the largest group of viable answers this guess can leave.
    pub worst_bucket: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MoveView {
    pub word: String,
    pub code: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolicyView {
    pub p: Value,
    pub fds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SessionView {
    pub session_id: String,
    pub mode: Mode,
    pub policy: PolicyView,
    pub round: u32,
    pub history: Vec<MoveView>,
    pub viable_count: usize,
    pub viable_sample: Vec<String>,
    pub suggestions: Vec<SuggestionView>,
    pub solved: bool,
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub p: Option<Value>,
    #[serde(default)]
    pub fds: bool,
}

#[derive(Debug, Deserialize)]
pub struct GuessRequest {
    pub word: String,
    pub code: String,
}

#[derive(Debug, Default, Deserialize)]
pub struct LimitQuery {
    pub limit: Option<usize>,
}

impl LimitQuery {
    fn get(&self) -> usize {
        self.limit.unwrap_or(DEFAULT_LIMIT).clamp(1, MAX_LIMIT)
    }
}

fn parse_mode(mode: Option<&str>) -> Result<Mode, ApiError> {
    match mode.map(|m| m.trim().to_ascii_lowercase()).as_deref() {
        None | Some("normal") => Ok(Mode::Normal),
        Some("hard") => Ok(Mode::Hard),
        Some(other) => Err(ApiError::invalid(format!("unknown mode {other:?}: expected normal or hard"))),
    }
}

fn parse_p(p: Option<&Value>) -> Result<ScoreMode, ApiError> {
    let mode = match p {
        None | Some(Value::Null) => return Ok(Policy::default().mode),
        Some(Value::Number(n)) => {
            let v = n.as_f64().ok_or_else(|| ApiError::invalid("p is not a finite number"))?;
            ScoreMode::finite(v)
        }
        Some(Value::String(s)) => s.parse(),
        Some(other) => return Err(ApiError::invalid(format!("p must be a number, \"inf\" or \"-inf\", got {other}"))),
    };
    mode.map_err(|e| ApiError::invalid(e.to_string()))
}

fn p_view(mode: ScoreMode) -> Value {
    match mode {
        ScoreMode::Finite(p) => serde_json::json!(p),
        ScoreMode::PosInf => Value::String("inf".into()),
        ScoreMode::NegInf => Value::String("-inf".into()),
    }
}

fn new_session_id() -> String {
    let mut bytes = [0u8; 16];
    rand::rng().fill_bytes(&mut bytes);
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn suggestions(state: &GameState<'_>, policy: &Policy, limit: usize) -> Vec<SuggestionView> {
    let cache = FdsCache::new(state.mode());
    rank_guesses_with(state, policy, Some(limit), &cache)
        .into_iter()
        .map(|r| {
            let h = bucket_histogram(state, r.row);
            SuggestionView {
                word: r.word.to_string(),
                score: r.score,
                in_viable: r.in_viable,
                expected_gy: r.expected_gy,
                worst_bucket: h.max_bucket().max(h.has_all_green() as u32),
            }
        })
        .collect()
}

impl AppState {
    /// Suggestions for a state; round one is shared by all sessions with the same policy.
    fn ranked(&self, state: &GameState<'_>, policy: &Policy, limit: usize) -> Vec<SuggestionView> {
        let limit = if state.viable().len() == 1 { 1 } else { limit };
        if !state.history().is_empty() {
            return suggestions(state, policy, limit);
        }
        let key = (state.mode(), policy.cache_key());
        let cached = self.round_one.lock().unwrap().get(&key).cloned();
        let top = match cached {
            Some(top) => top,
            None => {
                let top = Arc::new(suggestions(state, policy, MAX_LIMIT));
                self.round_one.lock().unwrap().insert(key, top.clone());
                top
            }
        };
        top.iter().take(limit).cloned().collect()
    }

    fn view(&self, id: &str, session: &Session, limit: usize) -> Result<SessionView, ApiError> {
        let setup = &*self.setup;
        let moves = if session.solved {
            &session.history[..session.history.len() - 1]
        } else {
            &session.history[..]
        };
        let state = GameState::replay(setup, session.mode, moves)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        let word_length = setup.word_length();
        let history = session
            .history
            .iter()
            .map(|&(row, code)| MoveView {
                word: setup.guess_word(row as usize).to_string(),
                code: decode_code(code.0 as u32, word_length).unwrap().to_string(),
            })
            .collect();
        let (viable_count, viable_sample, suggestions) = if session.solved {
            let (row, _) = *session.history.last().unwrap();
            (1, vec![setup.guess_word(row as usize).to_string()], Vec::new())
        } else {
            (
                state.viable().len(),
                state.viable_words().take(VIABLE_SAMPLE).map(|w| w.to_string()).collect(),
                self.ranked(&state, &session.policy, limit),
            )
        };
        Ok(SessionView {
            session_id: id.to_string(),
            mode: session.mode,
            policy: PolicyView {
                p: p_view(session.policy.mode),
                fds: session.policy.use_fds,
            },
            round: session.history.len() as u32 + 1,
            history,
            viable_count,
            viable_sample,
            suggestions,
            solved: session.solved,
        })
    }
}

/// Runs CPU-bound ranking off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

async fn health(State(app): State<Arc<AppState>>) -> Json<Value> {
    Json(serde_json::json!({
        "status": "ok",
        "guesses": app.setup.guesses().len(),
        "answers": app.setup.answers().len(),
        "word_length": app.setup.word_length(),
        "sessions": app.session_count(),
    }))
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Query(limit): Query<LimitQuery>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let mode = parse_mode(req.mode.as_deref())?;
    let policy = Policy::new(parse_p(req.p.as_ref())?).with_fds(req.fds);
    if mode == Mode::Hard && !app.setup.answers_guessable() {
        return Err(ApiError::invalid(GameError::AnswersNotGuessable.to_string()));
    }
    app.sweep();
    if app.session_count() >= app.config.max_sessions {
        return Err(ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "too many open sessions"));
    }
    let id = new_session_id();
    let session = Session {
        mode,
        policy,
        history: Vec::new(),
        solved: false,
        last_used: Instant::now(),
    };
    let view = {
        let app = app.clone();
        let id = id.clone();
        blocking(move || {
            let view = app.view(&id, &session, limit.get());
            (view, session)
        })
        .await?
    };
    let (view, session) = view;
    let view = view?;
    app.sessions
        .lock()
        .unwrap()
        .insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(limit): Query<LimitQuery>,
) -> Result<Json<SessionView>, ApiError> {
    let handle = app.session(&id)?;
    let mut session = handle.clone().lock_owned().await;
    session.last_used = Instant::now();
    let view = blocking(move || app.view(&id, &session, limit.get())).await??;
    Ok(Json(view))
}

async fn delete_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match app.sessions.lock().unwrap().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}"))),
    }
}

async fn submit_guess(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(limit): Query<LimitQuery>,
    Json(req): Json<GuessRequest>,
) -> Result<Json<SessionView>, ApiError> {
    let setup = app.setup.clone();
    let word_length = setup.word_length();
    let row = setup
        .guesses()
        .index_of(&req.word)
        .ok_or_else(|| ApiError::invalid(format!("{:?} is not in the word list", req.word)))?;
    let code: ColorCode = ColorCode::parse(&req.code, word_length).map_err(|e| ApiError::invalid(e.to_string()))?;
    let code = encode_code(&code);

    let handle = app.session(&id)?;
    let mut session = handle.lock_owned().await;
    session.last_used = Instant::now();
    if session.solved {
        return Err(ApiError::new(StatusCode::CONFLICT, "this game is already solved"));
    }
    let view = blocking(move || {
        let state = GameState::replay(&setup, session.mode, &session.history)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        if code == setup.all_green() {
            if !state.is_row_viable(row) {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    format!("{} contradicts the feedback so far and can not be the answer", req.word),
                ));
            }
            session.history.push((row as u32, code));
            session.solved = true;
        } else {
            state.apply_feedback(row, code).map_err(|e| match e {
                GameError::InconsistentFeedback => ApiError::new(
                    StatusCode::CONFLICT,
                    "this pattern contradicts every remaining word; nothing was changed",
                ),
                GameError::NotAGuessRow(_) => ApiError::invalid(format!(
                    "{} can not be guessed now (already used, or not viable in hard mode)",
                    req.word
                )),
                other => ApiError::invalid(other.to_string()),
            })?;
            session.history.push((row as u32, code));
        }
        app.view(&id, &session, limit.get())
    })
    .await??;
    Ok(Json(view))
}

async fn undo(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(limit): Query<LimitQuery>,
) -> Result<Json<SessionView>, ApiError> {
    let handle = app.session(&id)?;
    let mut session = handle.lock_owned().await;
    session.last_used = Instant::now();
    if session.history.pop().is_none() {
        return Err(ApiError::new(StatusCode::CONFLICT, "nothing to undo"));
    }
    session.solved = false;
    let view = blocking(move || app.view(&id, &session, limit.get())).await??;
    Ok(Json(view))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(setup: Arc<GameSetup>, config: Config, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let app = router(AppState::new(setup, config));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}
