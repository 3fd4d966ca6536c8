use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Role;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sender {
    User,
    Agent(Role),
    /// Output of a deterministic tool run on behalf of an agent.
    Tool(String),
}

impl fmt::Display for Sender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sender::User => f.write_str("USER"),
            Sender::Agent(r) => f.write_str(r.code()),
            Sender::Tool(name) => write!(f, "tool:{name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Visibility {
    Global,
    /// Confined to the CMD/CMR sub-group.
    Nested,
}

/// What a message carries, so later roles can find the latest one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Artifact {
    Requirement,
    Report,
    Model,
    Schema,
    TestCases,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub round: u32,
    pub sender: Sender,
    pub body: String,
    pub payload: Option<Value>,
    /// A hint that named a valid candidate of the sender.
    pub next_speaker: Option<Role>,
    pub visibility: Visibility,
    pub artifact: Option<Artifact>,
}

impl Message {
    pub fn new(round: u32, sender: Sender, body: impl Into<String>, visibility: Visibility) -> Self {
        Self { round, sender, body: body.into(), payload: None, next_speaker: None, visibility, artifact: None }
    }

    pub fn with_artifact(mut self, artifact: Artifact) -> Self {
        self.artifact = Some(artifact);
        self
    }

    pub fn with_payload(mut self, payload: Option<Value>) -> Self {
        self.payload = payload;
        self
    }

    pub fn with_hint(mut self, hint: Option<Role>) -> Self {
        self.next_speaker = hint;
        self
    }
}

/// Shared message pool plus per-role contexts (indices of messages each
/// role sent or received).
#[derive(Debug, Clone, Default)]
pub struct ChatState {
    pool: Vec<Message>,
    contexts: BTreeMap<Role, BTreeSet<usize>>,
    pub round: u32,
    pub terminated: bool,
}

impl ChatState {
    pub fn pool(&self) -> &[Message] {
        &self.pool
    }

    /// Context indices of `role`, strictly increasing.
    pub fn context(&self, role: Role) -> Vec<usize> {
        self.contexts.get(&role).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    /// Appends `msg` once and records it in the sender's context and in the
    /// contexts of `recipients`. Nested messages only reach nested roles.
    pub fn append(&mut self, msg: Message, recipients: &[Role]) -> usize {
        let idx = self.pool.len();
        let nested = msg.visibility == Visibility::Nested;
        if let Sender::Agent(r) = msg.sender {
            self.contexts.entry(r).or_default().insert(idx);
        }
        for r in recipients {
            if !nested || r.is_nested() {
                self.contexts.entry(*r).or_default().insert(idx);
            }
        }
        self.pool.push(msg);
        idx
    }

    /// Marks a message as received by `role` (used when a prompt pulls in a
    /// shared artifact).
    pub fn deliver(&mut self, idx: usize, role: Role) {
        if self.pool[idx].visibility == Visibility::Global || role.is_nested() {
            self.contexts.entry(role).or_default().insert(idx);
        }
    }

    pub fn latest(&self, artifact: Artifact) -> Option<usize> {
        self.pool.iter().rposition(|m| m.artifact == Some(artifact) && m.visibility == Visibility::Global)
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            entries: self
                .pool
                .iter()
                .map(|m| TranscriptEntry {
                    round: m.round,
                    sender: m.sender.to_string(),
                    visibility: m.visibility,
                    body: m.body.clone(),
                    next_speaker: m.next_speaker.map(|r| r.wire_name().to_string()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: u32,
    pub sender: String,
    pub visibility: Visibility,
    pub body: String,
    pub next_speaker: Option<String>,
}

/// Replayable record of a run, serialized as a JSON list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcript serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_messages_stay_in_the_sub_group() {
        let mut s = ChatState::default();
        let i = s.append(
            Message::new(1, Sender::Agent(Role::ConceptualDesigner), "draft", Visibility::Nested),
            &[Role::ConceptualReviewer, Role::LogicalDesigner],
        );
        assert_eq!(s.context(Role::ConceptualReviewer), vec![i]);
        assert!(s.context(Role::LogicalDesigner).is_empty());
        s.deliver(i, Role::TestExecutor);
        assert!(s.context(Role::TestExecutor).is_empty());
    }

    #[test]
    fn contexts_are_increasing_and_transcript_round_trips() {
        let mut s = ChatState::default();
        s.append(
            Message::new(0, Sender::User, "need a db", Visibility::Global).with_artifact(Artifact::Requirement),
            &[],
        );
        let b = s.append(Message::new(1, Sender::Agent(Role::ProductManager), "report", Visibility::Global), &[]);
        s.deliver(0, Role::ProductManager);
        assert_eq!(s.context(Role::ProductManager), vec![0, b]);
        assert_eq!(s.latest(Artifact::Requirement), Some(0));
        let t = s.transcript();
        assert_eq!(Transcript::from_json(&t.to_json()).unwrap(), t);
        assert!(t.to_json().contains("\"visibility\": \"GLOBAL\""));
    }
}
