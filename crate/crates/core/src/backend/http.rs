use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{BackendError, CompletionBackend, CompletionRequest};

pub const ENV_ENDPOINT: &str = "ARA_LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "ARA_LLM_API_KEY";
pub const ENV_MODEL: &str = "ARA_LLM_MODEL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpConfig {
    /// Full chat-completions URL.
    pub endpoint: Option<String>,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    pub model: Option<String>,
    pub timeout_secs: u64,
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            endpoint: None,
            api_key: None,
            model: None,
            timeout_secs: 60,
            max_attempts: 4,
            initial_backoff_ms: 500,
            max_backoff_ms: 8_000,
        }
    }
}

impl HttpConfig {
    /// Fills endpoint, key and model from the environment where unset.
    pub fn with_env(mut self) -> Self {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.trim().is_empty());
        self.endpoint = self.endpoint.or_else(|| var(ENV_ENDPOINT));
        self.api_key = self.api_key.or_else(|| var(ENV_API_KEY));
        self.model = self.model.or_else(|| var(ENV_MODEL));
        self
    }

    /// Delay before retry number `retry` (1-based), doubling from the initial
    /// backoff and capped.
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u64.checked_shl(retry.saturating_sub(1)).unwrap_or(u64::MAX);
        Duration::from_millis(self.initial_backoff_ms.saturating_mul(factor).min(self.max_backoff_ms))
    }
}

/// OpenAI-style chat-completion client with capped exponential backoff on
/// transient failures (transport errors, 429, 5xx).
pub struct HttpBackend {
    id: String,
    config: HttpConfig,
    agent: ureq::Agent,
    attempts: AtomicU64,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        if config.endpoint.is_none() {
            return Err(BackendError::Transport(format!(
                "no endpoint configured (set {ENV_ENDPOINT})"
            )));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let id = format!("http:{}", config.model.as_deref().unwrap_or("default"));
        Ok(HttpBackend {
            id,
            config,
            agent,
            attempts: AtomicU64::new(0),
        })
    }

    pub fn from_env() -> Result<Self, BackendError> {
        Self::new(HttpConfig::default().with_env())
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    /// Total HTTP attempts made by this client.
    pub fn attempts(&self) -> u64 {
        self.attempts.load(Ordering::Relaxed)
    }

    fn attempt(&self, url: &str, key: &str, body: &[u8]) -> Result<String, BackendError> {
        self.attempts.fetch_add(1, Ordering::Relaxed);
        let mut resp = self
            .agent
            .post(url)
            .header("Authorization", &format!("Bearer {key}"))
            .header("Content-Type", "application/json")
            .send(body)
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(format!("reading body: {e}")))?;
        match status {
            200..=299 => first_choice_content(&text),
            401 | 403 => Err(BackendError::Auth(format!("HTTP {status}: {}", truncate(&text)))),
            429 => Err(BackendError::RateLimit(format!("HTTP 429: {}", truncate(&text)))),
            _ => Err(BackendError::Transport(format!("HTTP {status}: {}", truncate(&text)))),
        }
    }
}

fn truncate(s: &str) -> &str {
    &s[..s.floor_char_boundary(200)]
}

fn is_transient(err: &BackendError) -> bool {
    match err {
        BackendError::Transport(msg) => {
            // 4xx other than 429 will not improve on retry.
            !msg.starts_with("HTTP 4")
        }
        BackendError::RateLimit(_) => true,
        _ => false,
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

fn first_choice_content(body: &str) -> Result<String, BackendError> {
    let parsed: ChatResponse = serde_json::from_str(body)
        .map_err(|e| BackendError::MalformedResponse(format!("{e}: {}", truncate(body))))?;
    parsed
        .choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| BackendError::MalformedResponse("no choices[0].message.content".into()))
}

pub(crate) fn request_body(request: &CompletionRequest) -> serde_json::Value {
    let mut messages = Vec::new();
    if !request.system_text.is_empty() {
        messages.push(json!({"role": "system", "content": request.system_text}));
    }
    messages.push(json!({"role": "user", "content": request.user_text}));
    json!({
        "model": request.model_id,
        "messages": messages,
        "temperature": request.decoding.temperature,
        "max_tokens": request.decoding.max_tokens,
    })
}

impl CompletionBackend for HttpBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let key = self
            .config
            .api_key
            .as_deref()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| BackendError::Auth(format!("no credential configured (set {ENV_API_KEY})")))?;
        let url = self.config.endpoint.as_deref().expect("checked in new");
        let body = serde_json::to_vec(&request_body(request)).expect("body serializes");
        let max = self.config.max_attempts.max(1);
        let mut attempt = 1;
        loop {
            match self.attempt(url, key, &body) {
                Ok(text) => return Ok(text),
                Err(e) if attempt < max && is_transient(&e) => {
                    let wait = self.config.backoff(attempt);
                    log::warn!("backend attempt {attempt}/{max} failed ({e}); retrying in {wait:?}");
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                Err(e) => {
                    log::warn!("backend attempt {attempt}/{max} failed ({e}); giving up");
                    return Err(e);
                }
            }
        }
    }
}
