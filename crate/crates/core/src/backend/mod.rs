//! Text-completion service boundary.
//!
//! Three implementations sit behind [`CompletionBackend`]: a live
//! OpenAI-style chat-completion client ([`HttpBackend`]), a record/replay
//! pair ([`RecordingBackend`], [`ReplayBackend`]) for deterministic
//! end-to-end runs, and [`ScriptedBackend`] for unit tests.

mod http;
mod replay;
mod scripted;

pub use http::{HttpBackend, HttpConfig, ENV_API_KEY, ENV_ENDPOINT, ENV_MODEL};
pub use replay::{RecordEntry, RecordingBackend, ReplayBackend, RECORD_FORMAT_VERSION};
pub use scripted::ScriptedBackend;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Version tag of the request-key hash scheme. Bump when the key input
/// changes; it is written into every record file header.
pub const KEY_SCHEME: &str = "sha256-json-v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decoding {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for Decoding {
    fn default() -> Self {
        Decoding {
            temperature: 0.0,
            max_tokens: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub system_text: String,
    pub user_text: String,
    pub model_id: String,
    pub decoding: Decoding,
}

impl CompletionRequest {
    /// Stable key over every field: `v1-` + SHA-256 of the compact JSON
    /// encoding (fixed field order, shortest round-trip floats).
    pub fn key(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("request serializes");
        format!("v1-{}", sha256_hex(&canonical))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendErrorKind {
    Transport,
    Auth,
    RateLimit,
    MalformedResponse,
    ReplayMiss,
}

#[derive(Debug, Clone, Error)]
pub enum BackendError {
    #[error("backend transport error: {0}")]
    Transport(String),
    #[error("backend auth error: {0}")]
    Auth(String),
    #[error("backend rate limited: {0}")]
    RateLimit(String),
    #[error("malformed backend response: {0}")]
    MalformedResponse(String),
    /// A replayed request was never recorded, usually because the prompt
    /// drifted. `diff` describes how it differs from the nearest recording.
    #[error("replay miss for {key}\n{diff}")]
    ReplayMiss { key: String, diff: String },
}

impl BackendError {
    pub fn kind(&self) -> BackendErrorKind {
        match self {
            BackendError::Transport(_) => BackendErrorKind::Transport,
            BackendError::Auth(_) => BackendErrorKind::Auth,
            BackendError::RateLimit(_) => BackendErrorKind::RateLimit,
            BackendError::MalformedResponse(_) => BackendErrorKind::MalformedResponse,
            BackendError::ReplayMiss { .. } => BackendErrorKind::ReplayMiss,
        }
    }
}

/// A text-completion service. Implementations must tolerate concurrent calls.
pub trait CompletionBackend: Send + Sync {
    fn id(&self) -> &str;
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError>;
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for std::sync::Arc<B> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        (**self).complete(request)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
