use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackendRequest {
    /// Role code (`PM`, `CMD`, ...) or `judge`.
    pub role: String,
    pub round: u32,
    /// How many times this role has spoken in the run, counting this turn.
    pub turn: u32,
    /// Attempt number within the turn, starting at 1.
    pub attempt: u32,
    pub prompt: String,
    pub temperature: f64,
    pub top_p: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendResponse {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response shape: {0}")]
    Shape(String),
    #[error("script has no response for {role} (round {round}, turn {turn}, attempt {attempt})")]
    NoScriptedResponse { role: String, round: u32, turn: u32, attempt: u32 },
}

/// A chat-completion style model. Shared across concurrent pipeline runs.
pub trait Backend: Send + Sync {
    fn complete(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError>;
}

/// One scripted reply. `round` and `turn` select when it applies; `attempt`
/// narrows it to one retry. Omitted selectors match anything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempt: Option<u32>,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    #[serde(default)]
    pub entries: Vec<ScriptEntry>,
    /// Reply used for a role when no entry matches.
    #[serde(default)]
    pub defaults: BTreeMap<String, String>,
}

/// Replays canned replies. Stateless, so concurrent runs cannot interfere.
/// The most specific matching entry wins; ties go to the earliest entry.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    script: Script,
}

impl ScriptedBackend {
    pub fn new(script: Script) -> Self {
        Self { script }
    }

    pub fn from_json(text: &str) -> Result<Self, BackendError> {
        serde_json::from_str(text).map(Self::new).map_err(|e| BackendError::Config(format!("bad script: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("cannot read script {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Replays the agent turns of a recorded transcript by round.
    pub fn from_transcript(transcript: &super::Transcript) -> Self {
        let entries = transcript
            .entries
            .iter()
            .filter_map(|e| {
                let role: super::Role = e.sender.parse().ok()?;
                Some(ScriptEntry {
                    role: role.code().to_string(),
                    round: Some(e.round),
                    turn: None,
                    attempt: None,
                    text: e.body.clone(),
                })
            })
            .collect();
        Self::new(Script { entries, defaults: BTreeMap::new() })
    }

    pub fn script(&self) -> &Script {
        &self.script
    }
}

fn role_matches(entry: &str, requested: &str) -> bool {
    if entry.eq_ignore_ascii_case(requested) {
        return true;
    }
    match (entry.parse::<super::Role>(), requested.parse::<super::Role>()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

impl Backend for ScriptedBackend {
    fn complete(&self, req: &BackendRequest) -> Result<BackendResponse, BackendError> {
        let best = self
            .script
            .entries
            .iter()
            .filter(|e| role_matches(&e.role, &req.role))
            .filter(|e| e.round.is_none_or(|r| r == req.round))
            .filter(|e| e.turn.is_none_or(|t| t == req.turn))
            .filter(|e| e.attempt.is_none_or(|a| a == req.attempt))
            .enumerate()
            .max_by_key(|(i, e)| {
                let score = e.round.is_some() as u8 * 4 + e.turn.is_some() as u8 * 2 + e.attempt.is_some() as u8;
                (score, std::cmp::Reverse(*i))
            })
            .map(|(_, e)| e.text.clone());
        let text = best.or_else(|| {
            self.script.defaults.iter().find(|(role, _)| role_matches(role, &req.role)).map(|(_, t)| t.clone())
        });
        text.map(|text| BackendResponse { text }).ok_or_else(|| BackendError::NoScriptedResponse {
            role: req.role.clone(),
            round: req.round,
            turn: req.turn,
            attempt: req.attempt,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    /// Base URL of an OpenAI-compatible API; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: u64,
    /// Transport-level retries (connection errors, 429 and 5xx).
    pub max_retries: u32,
}

impl Default for HttpConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 120,
            max_retries: 3,
        }
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend").field("config", &self.config).finish_non_exhaustive()
    }
}

impl HttpBackend {
    /// Reads the API key from the configured environment variable.
    pub fn from_env(config: HttpConfig) -> Result<Self, BackendError> {
        let api_key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| BackendError::Config(format!("environment variable {} is not set", config.api_key_env)))?;
        Self::with_key(config, api_key)
    }

    pub fn with_key(config: HttpConfig, api_key: String) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(Self { config, api_key, client })
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    fn send_once(&self, req: &BackendRequest) -> Result<BackendResponse, BackendError> {
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "top_p": req.top_p,
        });
        let resp = self
            .client
            .post(self.endpoint())
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Status { status: status.as_u16(), body: text });
        }
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| BackendError::Shape(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(|s| BackendResponse { text: s.to_string() })
            .ok_or_else(|| BackendError::Shape("missing choices[0].message.content".into()))
    }
}

fn retryable(e: &BackendError) -> bool {
    match e {
        BackendError::Transport(_) => true,
        BackendError::Status { status, .. } => *status == 429 || *status >= 500,
        _ => false,
    }
}

impl Backend for HttpBackend {
    fn complete(&self, req: &BackendRequest) -> Result<BackendResponse, BackendError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.send_once(req) {
                Err(e) if retryable(&e) && attempt <= self.config.max_retries => {
                    tracing::warn!(error = %e, attempt, "backend call failed; retrying");
                    std::thread::sleep(Duration::from_millis(200 * u64::from(attempt)));
                }
                other => return other,
            }
        }
    }
}
