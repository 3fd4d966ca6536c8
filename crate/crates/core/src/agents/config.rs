use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::backend::HttpConfig;

/// Hard upper bound on chat rounds.
pub const MAX_ROUNDS: u32 = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub temperature: f64,
    pub top_p: f64,
    pub round_cap: u32,
    /// Attempts per turn when output cannot be parsed.
    pub retry_cap: u32,
    /// CMD/CMR iterations per nested run.
    pub nested_cap: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { temperature: 1.0, top_p: 1.0, round_cap: MAX_ROUNDS, retry_cap: 3, nested_cap: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(1..=MAX_ROUNDS).contains(&self.round_cap) {
            return bad(format!("round_cap must be in 1..={MAX_ROUNDS}, got {}", self.round_cap));
        }
        if self.retry_cap == 0 {
            return bad("retry_cap must be at least 1".into());
        }
        if self.nested_cap == 0 {
            return bad("nested_cap must be at least 1".into());
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad(format!("temperature {} is outside [0, 2]", self.temperature));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad(format!("top_p {} is outside (0, 1]", self.top_p));
        }
        Ok(())
    }
}

/// Contents of the TOML configuration file.
///
/// ```toml
/// [http]
/// base_url = "https://api.openai.com/v1"
/// model = "gpt-4o"
/// api_key_env = "OPENAI_API_KEY"
///
/// [pipeline]
/// round_cap = 15
/// retry_cap = 3
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub http: HttpConfig,
    pub pipeline: PipelineConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.pipeline.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }
}
