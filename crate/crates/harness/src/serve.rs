//! HTTP session service for people taking a ladder interactively.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/v1/sessions` | `{dimension?, direction?, input_mode?, seed?}` | session view |
//! | GET | `/v1/sessions/{id}` | | session view |
//! | POST | `/v1/sessions/{id}/answers` | `{question_id, option_index}` | `{accepted, round_complete, transition?, session}` |
//! | GET | `/v1/assets/{hash}.svg` | | SVG |
//!
//! Every JSON reply carries `format_version`. Errors reply
//! `{format_version, error, message}` where `error` is one of
//! `SessionNotFound`, `QuestionNotFound`, `AnswerAlreadySubmitted`,
//! `OptionOutOfRange`, `SessionTerminated`, `AssetNotFound` or
//! `BadRequest`. There is no time limit on a question.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use deformbench::codec::FORMAT_VERSION;
use deformbench::ladder::{LadderConfig, LadderState, Transition};
use deformbench::render::RenderStyle;
use deformbench::rng::{derive_seed, SeededRandom};
use deformbench::taskgen::{assemble_question, AssetRole, Dimension, Direction, InputMode, Question};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::eval::HistoryLine;

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub seed: u64,
    pub level_cap: Option<u32>,
    pub dimension: Dimension,
    pub direction: Direction,
    pub input_mode: InputMode,
    /// Rounds are appended to `history.jsonl` here.
    pub history_dir: Option<PathBuf>,
    /// Served at `/` when set.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            level_cap: None,
            dimension: Dimension::TwoD,
            direction: Direction::Forward,
            input_mode: InputMode::Image,
            history_dir: None,
            static_dir: None,
        }
    }
}

struct Session {
    id: String,
    config: LadderConfig,
    rng: SeededRandom,
    state: LadderState,
    batch: Vec<Question>,
    answers: Vec<Option<usize>>,
    last_transition: Option<Transition>,
}

struct AppState {
    config: ServeConfig,
    counter: AtomicU64,
    sessions: RwLock<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
    assets: RwLock<HashMap<String, String>>,
    history: Mutex<()>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetView {
    pub role: AssetRole,
    pub url: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionView {
    pub question_id: String,
    pub steps: u32,
    /// Full codec stem in encoded mode.
    pub stem_text: Option<String>,
    /// The action list, for forward questions.
    pub actions: Option<String>,
    /// Option texts when options are not shown as an image.
    pub option_texts: Vec<String>,
    pub option_count: usize,
    pub assets: Vec<AssetView>,
    pub answered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub dimension: Dimension,
    pub direction: Direction,
    pub input_mode: InputMode,
    pub level: u32,
    pub round: usize,
    pub answered: usize,
    pub questions_per_level: u32,
    pub terminal: bool,
    pub capped: bool,
    pub score: Option<u32>,
    pub last_transition: Option<Transition>,
    pub batch: Vec<QuestionView>,
    pub format_version: u32,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self { status, kind, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"format_version": FORMAT_VERSION, "error": self.kind, "message": self.message});
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.body_text())
    }
}

fn question_view(q: &Question, answered: bool) -> QuestionView {
    let mode = q.spec.input_mode;
    let text_options = mode == InputMode::Encoded || q.spec.direction == Direction::Inverse;
    QuestionView {
        question_id: q.id.clone(),
        steps: q.spec.n,
        stem_text: (mode == InputMode::Encoded).then(|| q.stem_encoding()),
        actions: (q.spec.direction == Direction::Forward).then(|| q.target_actions.encode()),
        option_texts: if text_options { q.option_encodings() } else { Vec::new() },
        option_count: q.options.len(),
        assets: q
            .assets
            .iter()
            .map(|a| AssetView { role: a.role, url: format!("/v1/{}", a.relative_path()) })
            .collect(),
        answered,
    }
}

impl Session {
    fn view(&self) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            dimension: self.config.dimension,
            direction: self.config.direction,
            input_mode: self.config.input_mode,
            level: self.state.level,
            round: self.state.history.len() + usize::from(!self.state.terminal),
            answered: self.answers.iter().filter(|a| a.is_some()).count(),
            questions_per_level: self.config.questions_per_level,
            terminal: self.state.terminal,
            capped: self.state.capped,
            score: self.state.terminal.then(|| self.state.score()),
            last_transition: self.last_transition,
            batch: self.batch.iter().zip(&self.answers).map(|(q, a)| question_view(q, a.is_some())).collect(),
            format_version: FORMAT_VERSION,
        }
    }

    fn deal(&mut self, app: &AppState) -> Result<(), ApiError> {
        self.batch.clear();
        self.answers.clear();
        if self.state.terminal {
            return Ok(());
        }
        let internal = |e: String| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e);
        let specs = self.state.next_batch(&self.config, &self.rng).map_err(|e| internal(e.to_string()))?;
        let style = RenderStyle::default();
        for spec in &specs {
            let q = assemble_question(spec, &style).map_err(|e| internal(e.to_string()))?;
            let mut assets = app.assets.write().expect("asset lock");
            for a in &q.assets {
                assets.entry(a.hash.clone()).or_insert_with(|| a.svg.clone());
            }
            self.batch.push(q);
        }
        self.answers = vec![None; self.batch.len()];
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
struct CreateBody {
    dimension: Option<Dimension>,
    direction: Option<Direction>,
    input_mode: Option<InputMode>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
struct AnswerBody {
    question_id: String,
    option_index: usize,
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Result<Json<CreateBody>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(body) = body?;
    let n = app.counter.fetch_add(1, Ordering::SeqCst);
    let id = format!("{:016x}", derive_seed(app.config.seed, &format!("session-{n}")));
    let seed = body.seed.unwrap_or_else(|| derive_seed(app.config.seed, &format!("session-seed-{n}")));
    let config = LadderConfig {
        level_cap: app.config.level_cap,
        dimension: body.dimension.unwrap_or(app.config.dimension),
        direction: body.direction.unwrap_or(app.config.direction),
        input_mode: body.input_mode.unwrap_or(app.config.input_mode),
        ..LadderConfig::default()
    };
    let mut session = Session {
        id: id.clone(),
        state: LadderState::new(&config),
        config,
        rng: SeededRandom::new(seed),
        batch: Vec::new(),
        answers: Vec::new(),
        last_transition: None,
    };
    session.deal(&app)?;
    let view = session.view();
    app.sessions.write().expect("session lock").insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

fn find_session(app: &AppState, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
    app.sessions
        .read()
        .expect("session lock")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "SessionNotFound", format!("no session `{id}`")))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let session = find_session(&app, &id)?;
    let view = session.lock().await.view();
    Ok(Json(view))
}

async fn submit_answer(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<AnswerBody>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(body) = body?;
    let session = find_session(&app, &id)?;
    let mut s = session.lock().await;
    if s.state.terminal {
        return Err(ApiError::new(StatusCode::CONFLICT, "SessionTerminated", "the ladder has ended"));
    }
    let slot = s.batch.iter().position(|q| q.id == body.question_id).ok_or_else(|| {
        ApiError::new(StatusCode::NOT_FOUND, "QuestionNotFound", format!("`{}` is not in the current round", body.question_id))
    })?;
    if s.answers[slot].is_some() {
        return Err(ApiError::new(StatusCode::CONFLICT, "AnswerAlreadySubmitted", "only one answer per question"));
    }
    if body.option_index >= s.batch[slot].options.len() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "OptionOutOfRange", format!("option {}", body.option_index)));
    }
    s.answers[slot] = Some(body.option_index);
    let complete = s.answers.iter().all(Option::is_some);
    let mut transition = None;
    if complete {
        let correct = s.batch.iter().zip(&s.answers).filter(|(q, a)| **a == Some(q.gt_index)).count() as u32;
        let ids = s.batch.iter().map(|q| q.id.clone()).collect();
        let answers = s.answers.clone();
        let config = s.config;
        let t = s
            .state
            .record_round(&config, correct, ids, answers)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?;
        s.last_transition = Some(t);
        transition = Some(t);
        append_history(&app, &s);
        s.deal(&app)?;
    }
    Ok(Json(json!({
        "format_version": FORMAT_VERSION,
        "accepted": true,
        "round_complete": complete,
        "transition": transition,
        "session": s.view(),
    })))
}

fn append_history(app: &AppState, s: &Session) {
    let (Some(dir), Some(record)) = (&app.config.history_dir, s.state.history.last()) else { return };
    let line = HistoryLine { run_id: s.id.clone(), record: record.clone(), format_version: FORMAT_VERSION };
    let _guard = app.history.lock().expect("history lock");
    let written = std::fs::create_dir_all(dir).and_then(|_| {
        let mut f = OpenOptions::new().create(true).append(true).open(dir.join("history.jsonl"))?;
        writeln!(f, "{}", serde_json::to_string(&line).expect("history serializes"))
    });
    if let Err(e) = written {
        tracing::error!(session = %s.id, error = %e, "could not append history");
    }
}

async fn get_asset(State(app): State<Arc<AppState>>, Path(file): Path<String>) -> Result<Response, ApiError> {
    let hash = file.strip_suffix(".svg").unwrap_or(&file);
    let svg = app.assets.read().expect("asset lock").get(hash).cloned();
    match svg {
        Some(svg) => Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response()),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, "AssetNotFound", format!("no asset `{file}`"))),
    }
}

pub fn serve_router(config: ServeConfig) -> Router {
    let static_dir = config.static_dir.clone();
    let app = Arc::new(AppState {
        config,
        counter: AtomicU64::new(0),
        sessions: RwLock::new(HashMap::new()),
        assets: RwLock::new(HashMap::new()),
        history: Mutex::new(()),
    });
    let router = Router::new()
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/answers", post(submit_answer))
        .route("/v1/assets/{file}", get(get_asset))
        .with_state(app);
    match static_dir {
        Some(dir) => router.fallback_service(ServeDir::new(dir)),
        None => router,
    }
}

/// Binds and serves until the process ends.
pub async fn serve(bind: &str, config: ServeConfig) -> std::io::Result<()> {
    let listener = TcpListener::bind(bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "session service listening");
    axum::serve(listener, serve_router(config)).await
}

/// Serves on an already bound listener in the background.
pub async fn spawn_serve(config: ServeConfig) -> std::io::Result<SocketAddr> {
    let listener = TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move {
        let _ = axum::serve(listener, serve_router(config)).await;
    });
    Ok(addr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use deformbench::ladder::{run_ladder, OracleAgent};
    use serde_json::Value;

    const SEED: u64 = 99;

    struct Client {
        http: reqwest::Client,
        base: String,
    }

    impl Client {
        async fn start(config: ServeConfig) -> Self {
            let addr = spawn_serve(config).await.unwrap();
            Self { http: reqwest::Client::new(), base: format!("http://{addr}") }
        }

        async fn post(&self, path: &str, body: Value) -> (u16, Value) {
            let r = self.http.post(format!("{}{path}", self.base)).json(&body).send().await.unwrap();
            (r.status().as_u16(), r.json().await.unwrap())
        }

        async fn get(&self, path: &str) -> (u16, String) {
            let r = self.http.get(format!("{}{path}", self.base)).send().await.unwrap();
            (r.status().as_u16(), r.text().await.unwrap())
        }
    }

    fn ladder(mode: InputMode, cap: Option<u32>) -> LadderConfig {
        LadderConfig { input_mode: mode, level_cap: cap, ..LadderConfig::default() }
    }

    /// Gold indices of the batch the service deals for this state.
    fn gold(config: &LadderConfig, state: &LadderState) -> HashMap<String, usize> {
        let rng = SeededRandom::new(SEED);
        let style = RenderStyle::default();
        state
            .next_batch(config, &rng)
            .unwrap()
            .iter()
            .map(|s| {
                let q = assemble_question(s, &style).unwrap();
                (q.id, q.gt_index)
            })
            .collect()
    }

    async fn create(c: &Client, mode: &str) -> Value {
        let (status, v) = c.post("/v1/sessions", json!({"dimension": "2d", "direction": "forward", "input_mode": mode, "seed": SEED})).await;
        assert_eq!(status, 201, "{v}");
        v
    }

    #[tokio::test]
    async fn three_correct_answers_promote() {
        let c = Client::start(ServeConfig::default()).await;
        let s = create(&c, "encoded").await;
        let id = s["session_id"].as_str().unwrap();
        assert_eq!(s["level"], 1);
        let config = ladder(InputMode::Encoded, None);
        let gt = gold(&config, &LadderState::new(&config));
        let batch = s["batch"].as_array().unwrap();
        assert_eq!(batch.len(), 5);
        let mut last = Value::Null;
        for (i, q) in batch.iter().enumerate() {
            let qid = q["question_id"].as_str().unwrap();
            assert!(q["stem_text"].as_str().unwrap().starts_with("[initial]"));
            let pick = if i < 3 { gt[qid] } else { (gt[qid] + 1) % 4 };
            let (status, v) = c.post(&format!("/v1/sessions/{id}/answers"), json!({"question_id": qid, "option_index": pick})).await;
            assert_eq!(status, 200, "{v}");
            assert_eq!(v["round_complete"], i == 4);
            last = v;
        }
        assert_eq!(last["transition"], "promoted");
        assert_eq!(last["session"]["level"], 2);
        assert_eq!(last["session"]["batch"][0]["steps"], 2);
    }

    #[tokio::test]
    async fn second_answer_to_a_question_is_rejected() {
        let c = Client::start(ServeConfig::default()).await;
        let s = create(&c, "encoded").await;
        let id = s["session_id"].as_str().unwrap();
        let qid = s["batch"][0]["question_id"].as_str().unwrap();
        let path = format!("/v1/sessions/{id}/answers");
        assert_eq!(c.post(&path, json!({"question_id": qid, "option_index": 0})).await.0, 200);
        let (status, v) = c.post(&path, json!({"question_id": qid, "option_index": 1})).await;
        assert_eq!(status, 409);
        assert_eq!(v["error"], "AnswerAlreadySubmitted");
        assert_eq!(v["format_version"], FORMAT_VERSION);
        let (_, state) = c.get(&format!("/v1/sessions/{id}")).await;
        let state: Value = serde_json::from_str(&state).unwrap();
        assert_eq!(state["answered"], 1);

        let (status, v) = c.post(&path, json!({"question_id": "nope", "option_index": 0})).await;
        assert_eq!((status, v["error"].as_str()), (404, Some("QuestionNotFound")));
        let (status, v) = c.post("/v1/sessions/missing/answers", json!({"question_id": qid, "option_index": 0})).await;
        assert_eq!((status, v["error"].as_str()), (404, Some("SessionNotFound")));
        let (status, v) = c.post(&path, json!({"question_id": s["batch"][1]["question_id"], "option_index": 9})).await;
        assert_eq!((status, v["error"].as_str()), (400, Some("OptionOutOfRange")));
    }

    #[tokio::test]
    async fn image_assets_are_served() {
        let c = Client::start(ServeConfig::default()).await;
        let s = create(&c, "image").await;
        let q = &s["batch"][0];
        assert!(q["stem_text"].is_null());
        assert!(q["option_texts"].as_array().unwrap().is_empty());
        let assets = q["assets"].as_array().unwrap();
        assert_eq!(assets.len(), 2);
        let (status, svg) = c.get(assets[1]["url"].as_str().unwrap()).await;
        assert_eq!(status, 200);
        assert!(svg.contains("data-option=\"A\""));
        assert_eq!(c.get("/v1/assets/deadbeef.svg").await.0, 404);
    }

    #[tokio::test]
    async fn history_matches_the_simulator() {
        let dir = tempfile::tempdir().unwrap();
        let cap = Some(4);
        let c = Client::start(ServeConfig { level_cap: cap, history_dir: Some(dir.path().into()), ..ServeConfig::default() })
            .await;
        let mut s = create(&c, "encoded").await;
        let id = s["session_id"].as_str().unwrap().to_string();
        let config = ladder(InputMode::Encoded, cap);
        let mut state = LadderState::new(&config);
        while s["terminal"] == false {
            let gt = gold(&config, &state);
            let mut answers = Vec::new();
            for q in s["batch"].as_array().unwrap().clone() {
                let qid = q["question_id"].as_str().unwrap();
                answers.push(gt[qid]);
                let (_, v) = c.post(&format!("/v1/sessions/{id}/answers"), json!({"question_id": qid, "option_index": gt[qid]})).await;
                s = v["session"].clone();
            }
            let ids = gold(&config, &state).into_keys().collect::<Vec<_>>();
            state.record_round(&config, 5, ids, answers.into_iter().map(Some).collect()).unwrap();
        }
        assert_eq!(s["score"], 4);

        let sim = run_ladder(&mut OracleAgent, &config, &SeededRandom::new(SEED), &RenderStyle::default()).unwrap();
        let served: Vec<HistoryLine> = std::fs::read_to_string(dir.path().join("history.jsonl"))
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        let served: Vec<_> = served.into_iter().map(|l| l.record).collect();
        assert_eq!(served, sim.state.history);
    }
}
