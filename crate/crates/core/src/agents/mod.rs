//! Six-role group chat that drives a requirement to a normalized schema.
//! Model calls go through [`Backend`]; everything else is deterministic.

mod backend;
mod chat;
mod config;
mod extract;
mod pipeline;
pub mod prompts;
mod role;

pub use backend::{
    Backend, BackendError, BackendRequest, BackendResponse, HttpBackend, HttpConfig, Script, ScriptEntry,
    ScriptedBackend,
};
pub use chat::{Artifact, ChatState, Message, Sender, Transcript, TranscriptEntry, Visibility};
pub use config::{Config, ConfigError, PipelineConfig, MAX_ROUNDS};
pub use extract::extract_structured;
pub use pipeline::{
    lmd_tool_calls, run_pipeline, LmdOutcome, PipelineError, PipelineResult, RenderedPrompt, Status, ToolCall,
};
pub use role::{select_next_speaker, validate_hint, NextSpeaker, Profiles, Role, RoleProfile, UnknownRole};
