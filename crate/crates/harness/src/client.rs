//! Model endpoints.

use std::fmt;
use std::time::{Duration, Instant};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::prompt::ChatMessage;
use crate::wire::{parse_response, request_body, Usage};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub name: String,
    /// Up to and including the API version, e.g. `http://host/v1`. The
    /// value `stub` starts the bundled oracle endpoint in-process.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token, if any.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

fn default_timeout() -> u64 {
    120
}
fn default_retries() -> u32 {
    4
}
fn default_backoff() -> u64 {
    500
}

impl EndpointConfig {
    pub fn new(name: &str, base_url: &str, model: &str) -> Self {
        Self {
            name: name.into(),
            base_url: base_url.into(),
            model: model.into(),
            token_env: None,
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
            backoff_ms: default_backoff(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("request timed out")]
    Timeout,
    #[error("endpoint rejected the credentials (HTTP {status})")]
    AuthError { status: u16 },
    #[error("rate limited; retry after {retry_after:?}")]
    RateLimited { retry_after: Option<Duration> },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("environment variable {0} is not set")]
    MissingToken(String),
}

impl QueryError {
    fn is_transient(&self) -> bool {
        match self {
            QueryError::Timeout | QueryError::RateLimited { .. } | QueryError::Transport(_) => true,
            QueryError::Http { status, .. } => *status >= 500 || *status == 408,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub usage: Option<Usage>,
    pub attempts: u32,
    pub latency: Duration,
}

/// One chat-completion call.
#[async_trait]
pub trait ChatModel: Send + Sync {
    async fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, QueryError>;
}

pub struct HttpEndpoint {
    config: EndpointConfig,
    token: Option<String>,
    client: reqwest::Client,
}

impl fmt::Debug for HttpEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpEndpoint")
            .field("config", &self.config)
            .field("token", &self.token.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpEndpoint {
    /// Reads the token from the configured environment variable.
    pub fn new(config: EndpointConfig) -> Result<Self, QueryError> {
        let token = match &config.token_env {
            Some(var) => Some(std::env::var(var).map_err(|_| QueryError::MissingToken(var.clone()))?),
            None => None,
        };
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| QueryError::Transport(e.to_string()))?;
        Ok(Self { config, token, client })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    async fn attempt(&self, body: &str) -> Result<(String, Option<Usage>), QueryError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let mut req = self
            .client
            .post(url)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_string());
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().await.map_err(|e| {
            if e.is_timeout() {
                QueryError::Timeout
            } else {
                QueryError::Transport(e.to_string())
            }
        })?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let text = resp.text().await.map_err(|e| QueryError::Transport(e.to_string()))?;
        match status {
            200..=299 => parse_response(&text).map_err(QueryError::MalformedResponse),
            401 | 403 => Err(QueryError::AuthError { status }),
            429 => Err(QueryError::RateLimited { retry_after }),
            _ => Err(QueryError::Http { status, body: text.chars().take(200).collect() }),
        }
    }
}

/// SHA-256 of the request bytes, used to correlate log lines.
pub fn request_hash(body: &str) -> String {
    hex::encode(&Sha256::digest(body.as_bytes())[..8])
}

#[async_trait]
impl ChatModel for HttpEndpoint {
    async fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, QueryError> {
        let body = request_body(&self.config.model, messages).to_string();
        let hash = request_hash(&body);
        let started = Instant::now();
        let mut attempt = 0;
        loop {
            attempt += 1;
            let result = self.attempt(&body).await;
            match &result {
                Ok(_) => tracing::debug!(endpoint = %self.config.name, request = %hash, attempt, "completed"),
                Err(e) => tracing::warn!(endpoint = %self.config.name, request = %hash, attempt, error = %e, "request failed"),
            }
            match result {
                Ok((text, usage)) => {
                    return Ok(Completion { text, usage, attempts: attempt, latency: started.elapsed() })
                }
                Err(e) if e.is_transient() && attempt <= self.config.max_retries => {
                    let backoff = Duration::from_millis(self.config.backoff_ms.saturating_mul(1 << (attempt - 1).min(16)));
                    let wait = match e {
                        QueryError::RateLimited { retry_after: Some(d) } => d,
                        _ => backoff,
                    };
                    tokio::time::sleep(wait).await;
                }
                Err(e) => return Err(e),
            }
        }
    }
}
