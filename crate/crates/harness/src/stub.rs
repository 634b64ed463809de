//! A chat-completions endpoint that answers by running the engines.
//!
//! It finds the last user message marked as a question, reads the task from
//! its text sections and, in image mode, from the `<desc>` element of the
//! last two images, then replies `Answer: X` for the option the engines
//! confirm. Test hooks can force error statuses or require a token.

use std::collections::VecDeque;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, LazyLock, Mutex};

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use deformbench::taskgen::{
    judge, option_letter, parse_sections, Actions, Candidate, Dimension, Direction, Subject, TaskError,
    SECTION_ACTIONS, SECTION_INITIAL, SECTION_TARGET,
};
use regex::Regex;
use serde_json::Value;
use tokio::net::TcpListener;
use tokio::sync::oneshot;

use crate::prompt::{ChatMessage, Role, INSTRUCTIONS_SECTION, QUESTION_MARKER, TASK_SECTION};
use crate::wire::{decode_messages, response_body, Usage};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StubBehavior {
    /// Solve with the engines.
    Oracle,
    /// Always send this text.
    Fixed(String),
}

#[derive(Debug, Clone)]
pub struct StubConfig {
    pub behavior: StubBehavior,
    /// Statuses returned, in order, before normal replies start.
    pub fail_first: Vec<u16>,
    /// `Retry-After` seconds sent with a 429.
    pub retry_after_secs: Option<u64>,
    /// When set, requests without this bearer token get a 401.
    pub required_token: Option<String>,
}

impl StubConfig {
    pub fn oracle() -> Self {
        Self { behavior: StubBehavior::Oracle, fail_first: Vec::new(), retry_after_secs: None, required_token: None }
    }

    pub fn fixed(text: &str) -> Self {
        Self { behavior: StubBehavior::Fixed(text.into()), ..Self::oracle() }
    }
}

struct StubState {
    config: StubConfig,
    failures: Mutex<VecDeque<u16>>,
    requests: Arc<AtomicUsize>,
}

pub fn stub_router(config: StubConfig, requests: Arc<AtomicUsize>) -> Router {
    let state = Arc::new(StubState { failures: Mutex::new(config.fail_first.iter().copied().collect()), config, requests });
    Router::new()
        .route("/v1/chat/completions", post(complete))
        .route("/chat/completions", post(complete))
        .with_state(state)
}

async fn complete(State(state): State<Arc<StubState>>, headers: HeaderMap, Json(body): Json<Value>) -> Response {
    state.requests.fetch_add(1, Ordering::SeqCst);
    if let Some(token) = &state.config.required_token {
        let expected = format!("Bearer {token}");
        if headers.get("authorization").and_then(|v| v.to_str().ok()) != Some(expected.as_str()) {
            return (StatusCode::UNAUTHORIZED, "bad token").into_response();
        }
    }
    let forced = state.failures.lock().expect("stub lock").pop_front();
    if let Some(status) = forced {
        let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let mut resp = (status, "forced failure").into_response();
        if let (StatusCode::TOO_MANY_REQUESTS, Some(secs)) = (status, state.config.retry_after_secs) {
            resp.headers_mut().insert("retry-after", secs.into());
        }
        return resp;
    }
    let model = body["model"].as_str().unwrap_or("stub").to_string();
    let text = match &state.config.behavior {
        StubBehavior::Fixed(t) => t.clone(),
        StubBehavior::Oracle => match decode_messages(&body).map_err(StubError).and_then(|m| solve(&m)) {
            Ok(i) => format!("Answer: {}", option_letter(i)),
            Err(e) => format!("I cannot determine the answer ({}).", e.0),
        },
    };
    let usage = Usage { prompt_tokens: body.to_string().len() as u64 / 4, completion_tokens: 3 };
    Json(response_body(&model, &text, usage)).into_response()
}

#[derive(Debug)]
pub struct StubError(pub String);

impl From<TaskError> for StubError {
    fn from(e: TaskError) -> Self {
        StubError(e.to_string())
    }
}

fn err(m: &str) -> StubError {
    StubError(m.to_string())
}

static DESC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"<desc>(shape|cube):([^<]*)</desc>").expect("valid regex"));

/// Encodings carried by an SVG, outermost first.
fn descs(svg: &str) -> Vec<String> {
    DESC.captures_iter(svg)
        .map(|c| {
            let code = c[2].replace("&lt;", "<").replace("&gt;", ">").replace("&quot;", "\"").replace("&amp;", "&");
            if &c[1] == "cube" {
                code.replace(" | ", "\n")
            } else {
                code
            }
        })
        .collect()
}

/// Index of the option the engines confirm for the question in `messages`.
pub fn solve(messages: &[ChatMessage]) -> Result<usize, StubError> {
    let question = messages
        .iter()
        .rev()
        .find(|m| m.role == Role::User && m.joined_text().trim_start().starts_with(QUESTION_MARKER))
        .ok_or_else(|| err("no question message"))?;
    let text = question.joined_text();
    let data = text.split(INSTRUCTIONS_SECTION).next().unwrap_or("");
    let sections = parse_sections(data)?;
    let find = |name: &str| sections.iter().find(|(h, _)| h == name).map(|(_, b)| b.as_str());
    let task = find(TASK_SECTION).ok_or_else(|| err("no task section"))?;
    let (dim, dir) = task.split_once(' ').ok_or_else(|| err("bad task line"))?;
    let dim: Dimension = dim.parse()?;
    let dir: Direction = dir.trim().parse()?;

    let images: Vec<&str> = question.images().collect();
    let last_two = &images[images.len().saturating_sub(2)..];
    let image_code = |i: usize| -> Result<String, StubError> {
        let svg = last_two.get(i).ok_or_else(|| err("missing image"))?;
        descs(svg).into_iter().next().ok_or_else(|| err("image without description"))
    };
    let initial = match find(SECTION_INITIAL) {
        Some(code) => Subject::parse(dim, code)?,
        None => Subject::parse(dim, &image_code(0)?)?,
    };
    let text_options: Vec<&str> = sections
        .iter()
        .filter(|(h, _)| h.starts_with("[option "))
        .map(|(_, b)| b.as_str())
        .collect();
    let (target, options): (Subject, Vec<Candidate>) = match dir {
        Direction::Forward => {
            let actions = Actions::parse(dim, find(SECTION_ACTIONS).ok_or_else(|| err("no actions"))?)?;
            let target = initial.apply(&actions, dim)?;
            let codes: Vec<String> = if text_options.is_empty() {
                let sheet = last_two.get(1).ok_or_else(|| err("missing option sheet"))?;
                descs(sheet)
            } else {
                text_options.iter().map(|s| s.to_string()).collect()
            };
            let options = codes
                .iter()
                .map(|c| Subject::parse(dim, c).map(Candidate::Outcome))
                .collect::<Result<_, _>>()?;
            (target, options)
        }
        Direction::Inverse => {
            let target = match find(SECTION_TARGET) {
                Some(code) => Subject::parse(dim, code)?,
                None => Subject::parse(dim, &image_code(1)?)?,
            };
            let options = text_options
                .iter()
                .map(|c| Actions::parse(dim, c).map(Candidate::Actions))
                .collect::<Result<_, _>>()?;
            (target, options)
        }
    };
    for (i, option) in options.iter().enumerate() {
        if judge(&initial, &target, option, dim)? {
            return Ok(i);
        }
    }
    Err(err("no option matches"))
}

/// A stub bound to a local port, shut down on drop.
pub struct StubHandle {
    pub addr: SocketAddr,
    pub requests: Arc<AtomicUsize>,
    shutdown: Option<oneshot::Sender<()>>,
}

impl StubHandle {
    /// Base URL for [`crate::client::EndpointConfig`].
    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}

/// Serves the stub on `addr` (port 0 picks a free port).
pub async fn spawn_stub(config: StubConfig, addr: &str) -> std::io::Result<StubHandle> {
    let listener = TcpListener::bind(addr).await?;
    let addr = listener.local_addr()?;
    let requests = Arc::new(AtomicUsize::new(0));
    let app = stub_router(config, requests.clone());
    let (tx, rx) = oneshot::channel::<()>();
    tokio::spawn(async move {
        let _ = axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await;
    });
    Ok(StubHandle { addr, requests, shutdown: Some(tx) })
}
