//! Chat-completion backends: the shared interface, an OpenAI-compatible HTTP client,
//! a record/replay store and an instrumented mock.

mod http;
mod mock;
mod replay;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GenerationParams, PromptBundle};
use crate::text::sha256_hex;

pub use http::{AuthStyle, ChatBackendConfig, HttpBackend};
pub use mock::MockBackend;
pub use replay::{record_replay_store, CacheEntry, RecordReplayBackend, ReplayMode, StoreStats};

/// Version tag mixed into every cache key. Bump when the key layout changes.
pub const CACHE_KEY_VERSION: &str = "spp-cache-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishReason {
    Stop,
    Length,
    ContentFilter,
}

impl FinishReason {
    /// Maps an OpenAI `finish_reason` string. Unknown values count as a normal stop.
    pub fn from_wire(s: Option<&str>) -> Self {
        match s {
            Some("length") => FinishReason::Length,
            Some("content_filter") => FinishReason::ContentFilter,
            _ => FinishReason::Stop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub finish_reason: FinishReason,
}

impl Completion {
    pub fn stop(text: impl Into<String>) -> Self {
        Self { text: text.into(), finish_reason: FinishReason::Stop }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("no recording for request key {0}")]
    MissingRecording(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("replay store: {0}")]
    Store(String),
    #[error("request has no messages")]
    EmptyRequest,
}

impl BackendError {
    /// Transport failures, 429 and 5xx are worth another attempt.
    pub fn is_retriable(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::Http { status, .. } => *status == 429 || (500..600).contains(status),
            _ => false,
        }
    }
}

/// One chat-completion call. Implementations must tolerate concurrent callers.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError>;
}

impl<B: ChatBackend + ?Sized> ChatBackend for &B {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        (**self).complete(bundle, params)
    }
}

impl<B: ChatBackend + ?Sized> ChatBackend for Box<B> {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        (**self).complete(bundle, params)
    }
}

impl<B: ChatBackend + ?Sized> ChatBackend for std::sync::Arc<B> {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        (**self).complete(bundle, params)
    }
}

/// Content address of a request.
///
/// SHA-256 (lowercase hex) of the compact JSON object
/// `{"v","model","messages","temperature","top_p","max_tokens","system_message_present"}`
/// with keys in exactly that order. Message text is hashed byte-for-byte.
pub fn cache_key(bundle: &PromptBundle, params: &GenerationParams) -> String {
    #[derive(Serialize)]
    struct KeyMaterial<'a> {
        v: &'static str,
        model: &'a str,
        messages: &'a [crate::model::ChatMessage],
        temperature: f64,
        top_p: f64,
        max_tokens: Option<u32>,
        system_message_present: bool,
    }
    let material = KeyMaterial {
        v: CACHE_KEY_VERSION,
        model: &params.model_name,
        messages: &bundle.messages,
        temperature: params.temperature,
        top_p: params.top_p,
        max_tokens: params.max_tokens.map(|n| n.get()),
        system_message_present: bundle.system_message().is_some(),
    };
    let json = serde_json::to_vec(&material).expect("key material serializes");
    sha256_hex(&json)
}

/// Delay before retry `attempt` (0-based). The last entry repeats once the schedule runs out.
pub fn backoff_delay(schedule: &[Duration], attempt: usize) -> Duration {
    schedule.get(attempt).or(schedule.last()).copied().unwrap_or_default()
}
