use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tracing::debug;

use super::{backoff_delay, BackendError, ChatBackend, Completion, FinishReason};
use crate::model::{GenerationParams, PromptBundle};

/// How the API key is sent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuthStyle {
    /// `Authorization: Bearer <key>`
    #[default]
    Bearer,
    /// `api-key: <key>` as used by Azure deployments.
    ApiKeyHeader,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChatBackendConfig {
    pub endpoint_url: String,
    /// Name of the environment variable holding the key. The key itself is never stored.
    pub api_key_env_var: String,
    pub model_name: String,
    #[serde(with = "secs")]
    pub timeout: Duration,
    pub max_retries: u32,
    #[serde(with = "secs_list")]
    pub retry_backoff: Vec<Duration>,
    pub max_parallel_requests: usize,
    /// Appended to `endpoint_url`. Azure needs something like
    /// `/openai/deployments/{model}/chat/completions?api-version=2023-03-15-preview`.
    pub path_template: String,
    pub auth_style: AuthStyle,
}

impl Default for ChatBackendConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "https://api.openai.com/v1".to_string(),
            api_key_env_var: "OPENAI_API_KEY".to_string(),
            model_name: "gpt-4".to_string(),
            timeout: Duration::from_secs(120),
            max_retries: 5,
            retry_backoff: [1, 2, 4, 8, 16].map(Duration::from_secs).to_vec(),
            max_parallel_requests: 4,
            path_template: "/chat/completions".to_string(),
            auth_style: AuthStyle::Bearer,
        }
    }
}

impl ChatBackendConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_parallel_requests == 0 {
            return Err("max_parallel_requests must be at least 1".into());
        }
        if self.endpoint_url.trim().is_empty() {
            return Err("endpoint_url is empty".into());
        }
        Ok(())
    }

    pub fn url(&self) -> String {
        let path = self.path_template.replace("{model}", &self.model_name);
        format!("{}{}", self.endpoint_url.trim_end_matches('/'), path)
    }
}

/// OpenAI-compatible chat-completions client.
pub struct HttpBackend {
    config: ChatBackendConfig,
    api_key: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend").field("config", &self.config).field("api_key", &"<redacted>").finish()
    }
}

impl HttpBackend {
    /// Reads the API key from the configured environment variable.
    pub fn from_env(config: ChatBackendConfig) -> Result<Self, BackendError> {
        let api_key = std::env::var(&config.api_key_env_var)
            .map_err(|_| BackendError::MissingApiKey(config.api_key_env_var.clone()))?;
        Ok(Self::with_key(config, api_key))
    }

    pub fn with_key(config: ChatBackendConfig, api_key: String) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Self { config, api_key, agent }
    }

    pub fn config(&self) -> &ChatBackendConfig {
        &self.config
    }

    fn request_body(bundle: &PromptBundle, params: &GenerationParams) -> Value {
        let mut body = json!({
            "model": params.model_name,
            "messages": bundle.messages,
            "temperature": params.temperature,
            "top_p": params.top_p,
        });
        if let Some(max) = params.max_tokens {
            body["max_tokens"] = json!(max.get());
        }
        body
    }

    fn attempt(&self, body: &Value) -> Result<Completion, BackendError> {
        let url = self.config.url();
        let request = self.agent.post(&url).header("Content-Type", "application/json");
        let request = match self.config.auth_style {
            AuthStyle::Bearer => request.header("Authorization", &format!("Bearer {}", self.api_key)),
            AuthStyle::ApiKeyHeader => request.header("api-key", &self.api_key),
        };
        let mut response = request.send_json(body).map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        debug!(status, body = %text, "chat completion response");
        if !(200..300).contains(&status) {
            return Err(BackendError::Http { status, body: text });
        }
        parse_response(&text)
    }
}

/// Extracts the first choice from an OpenAI-style response body.
pub(crate) fn parse_response(text: &str) -> Result<Completion, BackendError> {
    let value: Value = serde_json::from_str(text).map_err(|e| BackendError::Malformed(e.to_string()))?;
    let choice = value
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| BackendError::Malformed("no choices".into()))?;
    let finish_reason = FinishReason::from_wire(choice.get("finish_reason").and_then(Value::as_str));
    let content = choice.get("message").and_then(|m| m.get("content")).and_then(Value::as_str);
    match (content, finish_reason) {
        (Some(text), _) => Ok(Completion { text: text.to_string(), finish_reason }),
        (None, FinishReason::ContentFilter) => Ok(Completion { text: String::new(), finish_reason }),
        (None, _) => Err(BackendError::Malformed("choice has no message content".into())),
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        if bundle.messages.is_empty() {
            return Err(BackendError::EmptyRequest);
        }
        let body = Self::request_body(bundle, params);
        debug!(url = %self.config.url(), request = %body, "chat completion request");
        let mut attempt = 0usize;
        loop {
            match self.attempt(&body) {
                Err(e) if e.is_retriable() && attempt < self.config.max_retries as usize => {
                    let delay = backoff_delay(&self.config.retry_backoff, attempt);
                    tracing::warn!(error = %e, attempt, ?delay, "retrying chat completion");
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

mod secs_list {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Duration], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(Duration::as_secs_f64).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Duration>, D::Error> {
        Vec::<f64>::deserialize(d)?
            .into_iter()
            .map(|secs| Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom))
            .collect()
    }
}
