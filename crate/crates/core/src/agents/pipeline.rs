//! The turn-taking chat: PM, then the nested CMD/CMR group, LMD with its
//! tool calls, QAE and TE, with hint-driven redirection.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use super::backend::{Backend, BackendRequest};
use super::chat::{Artifact, ChatState, Message, Sender, Transcript, Visibility};
use super::config::PipelineConfig;
use super::extract::extract_structured;
use super::role::{validate_hint, Profiles, Role};
use crate::er::{
    entity_keys, map_to_logical, normalize_logical, relationship_keys, review_conceptual_model, ConceptualModel,
    ErError, ErFd, Finding, LogicalDesign, Severity,
};
use crate::fd::is_3nf;
use crate::schema::{serialize_schema, validate_schema, Schema};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Status {
    /// TE said TERMINAL and the schema validates.
    Converged,
    RoundCap,
    /// Forward order ran off the end without a TERMINAL.
    EndedWithoutTerminal,
    /// TERMINAL was said but there is no valid schema.
    InvalidSchema(String),
    /// Backend failure or output that stayed unusable after all retries.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub role: Role,
    pub round: u32,
    pub attempt: u32,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub status: Status,
    pub schema: Option<Schema>,
    pub design: Option<LogicalDesign>,
    pub model: Option<ConceptualModel>,
    pub transcript: Transcript,
    pub rounds: u32,
    /// Rejections and error reports sent back to an earlier role.
    pub feedback_events: u32,
    /// CMD/CMR iterations of each nested run, in order.
    pub nested_iterations: Vec<u32>,
    pub flags: Vec<String>,
    pub prompts: Vec<RenderedPrompt>,
    pub backend_calls: u32,
}

impl PipelineResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn received_feedback(&self) -> bool {
        self.feedback_events > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("requirement is empty")]
    EmptyRequirement,
    #[error(transparent)]
    Config(#[from] super::config::ConfigError),
}

/// Output of one deterministic tool, as posted to the chat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolCall {
    pub tool: &'static str,
    pub output: String,
}

#[derive(Debug, Clone)]
pub struct LmdOutcome {
    pub calls: Vec<ToolCall>,
    pub result: Result<LogicalDesign, ErError>,
}

/// Key identification for entity and relationship sets, then mapping and
/// normalization. Each finished tool leaves a [`ToolCall`]; the first
/// failure stops the chain.
pub fn lmd_tool_calls(model: &ConceptualModel) -> LmdOutcome {
    let mut calls = Vec::new();
    let result = (|| {
        let ek = entity_keys(model);
        let ek = log_call(&mut calls, "candidate_keys", ek, |keys| {
            keys.iter().map(describe_key).collect::<Vec<_>>().join("\n")
        })?;
        let rk = relationship_keys(model, &ek);
        log_call(&mut calls, "relationship_keys", rk, |keys| {
            if keys.is_empty() {
                "no relationship sets".to_string()
            } else {
                keys.iter().map(describe_key).collect::<Vec<_>>().join("\n")
            }
        })?;
        let mapped = map_to_logical(model)?;
        let normalized = normalize_logical(&mapped.schema, &mapped.fds);
        log_call(&mut calls, "normalize_logical", normalized, |d| {
            serialize_schema(&d.schema).unwrap_or_else(|e| format!("unserializable schema: {e}"))
        })
    })();
    LmdOutcome { calls, result }
}

fn log_call<T>(
    calls: &mut Vec<ToolCall>,
    tool: &'static str,
    r: Result<T, ErError>,
    show: impl FnOnce(&T) -> String,
) -> Result<T, ErError> {
    let output = match &r {
        Ok(v) => show(v),
        Err(e) => format!("error: {e}"),
    };
    calls.push(ToolCall { tool, output });
    r
}

fn describe_key(k: &crate::er::SetKey) -> String {
    let key: Vec<&str> = k.key.iter().map(String::as_str).collect();
    let mut s = format!("{}: key ({})", k.set, key.join(", "));
    if k.surrogate {
        s.push_str(" [surrogate added]");
    }
    s
}

enum Stop {
    RoundCap,
    Failed(String),
}

enum CmdReply {
    Model(ConceptualModel, Value),
    /// A question for PM instead of a model.
    Clarify(Value),
}

struct CmrVerdict {
    approved: bool,
    payload: Value,
}

struct LmdReply {
    fds: Vec<(String, Vec<ErFd>)>,
    errors: Vec<String>,
    payload: Value,
}

struct Run<'a> {
    backend: &'a dyn Backend,
    cfg: &'a PipelineConfig,
    profiles: Profiles,
    state: ChatState,
    turns: BTreeMap<Role, u32>,
    prompts: Vec<RenderedPrompt>,
    feedback: u32,
    nested_iterations: Vec<u32>,
    flags: Vec<String>,
    model: Option<ConceptualModel>,
    design: Option<LogicalDesign>,
    calls: u32,
}

/// Runs the chat for one requirement. Failures during the run are reported
/// through [`PipelineResult::status`] together with the transcript so far.
pub fn run_pipeline(
    requirement: &str,
    backend: &dyn Backend,
    cfg: &PipelineConfig,
) -> Result<PipelineResult, PipelineError> {
    if requirement.trim().is_empty() {
        return Err(PipelineError::EmptyRequirement);
    }
    cfg.validate()?;
    let mut run = Run {
        backend,
        cfg,
        profiles: Profiles::default(),
        state: ChatState::default(),
        turns: BTreeMap::new(),
        prompts: Vec::new(),
        feedback: 0,
        nested_iterations: Vec::new(),
        flags: Vec::new(),
        model: None,
        design: None,
        calls: 0,
    };
    run.state.append(
        Message::new(0, Sender::User, requirement, Visibility::Global).with_artifact(Artifact::Requirement),
        &[Role::ProductManager],
    );
    let status = match run.drive() {
        Ok(()) => run.final_status(),
        Err(Stop::RoundCap) => {
            run.state.terminated = true;
            Status::RoundCap
        }
        Err(Stop::Failed(reason)) => Status::Failed(reason),
    };
    tracing::info!(?status, rounds = run.state.round, "pipeline finished");
    Ok(PipelineResult {
        status,
        schema: run.design.as_ref().map(|d| d.schema.clone()),
        design: run.design,
        model: run.model,
        transcript: run.state.transcript(),
        rounds: run.state.round,
        feedback_events: run.feedback,
        nested_iterations: run.nested_iterations,
        flags: run.flags,
        prompts: run.prompts,
        backend_calls: run.calls,
    })
}

fn hint_of(payload: &Value) -> Option<&str> {
    payload.get("next_speaker").and_then(Value::as_str)
}

impl Run<'_> {
    fn drive(&mut self) -> Result<(), Stop> {
        let mut next = Some(Role::ProductManager);
        while let Some(role) = next {
            next = match role {
                Role::ProductManager => self.pm()?,
                Role::ConceptualDesigner | Role::ConceptualReviewer => self.nested_group()?,
                Role::LogicalDesigner => self.lmd()?,
                Role::QaEngineer => self.qae()?,
                Role::TestExecutor => self.te()?,
            };
            if self.state.terminated {
                break;
            }
        }
        Ok(())
    }

    fn final_status(&self) -> Status {
        if !self.state.terminated {
            return Status::EndedWithoutTerminal;
        }
        match &self.design {
            None => Status::InvalidSchema("no schema was produced".into()),
            Some(d) => {
                let report = validate_schema(&d.schema);
                if report.is_ok() {
                    Status::Converged
                } else {
                    Status::InvalidSchema(report.to_string())
                }
            }
        }
    }

    /// Artifacts a role reads besides its own context.
    fn wanted(role: Role) -> &'static [Artifact] {
        use Artifact::*;
        match role {
            Role::ProductManager => &[Requirement],
            Role::ConceptualDesigner => &[Requirement, Report, Model],
            Role::ConceptualReviewer => &[Requirement, Report],
            Role::LogicalDesigner => &[Requirement, Report, Model],
            Role::QaEngineer => &[Requirement, Report, Schema],
            Role::TestExecutor => &[Requirement, Report, Schema, TestCases],
        }
    }

    fn render(&mut self, role: Role, extra: &str) -> String {
        for a in Self::wanted(role) {
            if let Some(i) = self.state.latest(*a) {
                self.state.deliver(i, role);
            }
        }
        let pool = self.state.pool();
        let mut input: Vec<String> = self
            .state
            .context(role)
            .into_iter()
            .map(|i| {
                let m = &pool[i];
                format!("--- {} (round {}) ---\n{}", m.sender, m.round, m.body)
            })
            .collect();
        if !extra.is_empty() {
            input.push(extra.to_string());
        }
        self.profiles.get(role).render(&input.join("\n\n"))
    }

    /// One backend turn: a new round, then up to `retry_cap` attempts until
    /// `parse` accepts the reply.
    fn turn<T>(
        &mut self,
        role: Role,
        extra: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<(String, T), Stop> {
        if self.state.round >= self.cfg.round_cap {
            return Err(Stop::RoundCap);
        }
        self.state.round += 1;
        let round = self.state.round;
        let turn = {
            let t = self.turns.entry(role).or_insert(0);
            *t += 1;
            *t
        };
        let prompt = self.render(role, extra);
        let mut last_err = String::new();
        for attempt in 1..=self.cfg.retry_cap {
            let text = if attempt == 1 {
                prompt.clone()
            } else {
                format!("{prompt}\nYour previous reply could not be used ({last_err}). Reply again in the required format.\n")
            };
            self.prompts.push(RenderedPrompt { role, round, attempt, text: text.clone() });
            let req = BackendRequest {
                role: role.code().to_string(),
                round,
                turn,
                attempt,
                prompt: text,
                temperature: self.cfg.temperature,
                top_p: self.cfg.top_p,
            };
            self.calls += 1;
            let resp = self.backend.complete(&req).map_err(|e| Stop::Failed(format!("{role} round {round}: {e}")))?;
            match parse(&resp.text) {
                Ok(v) => return Ok((resp.text, v)),
                Err(e) => {
                    tracing::warn!(role = %role, round, attempt, error = %e, "unusable reply");
                    last_err = e;
                }
            }
        }
        Err(Stop::Failed(format!(
            "{role} round {round}: output unusable after {} attempts: {last_err}",
            self.cfg.retry_cap
        )))
    }

    fn pm(&mut self) -> Result<Option<Role>, Stop> {
        let role = Role::ProductManager;
        let (body, payload) = self.turn(role, "", |t| Ok(extract_structured(t).ok()))?;
        let hint = payload.as_ref().and_then(|p| validate_hint(role, hint_of(p), &self.profiles));
        let next = hint.or(role.forward());
        let msg = Message::new(self.state.round, Sender::Agent(role), body, Visibility::Global)
            .with_artifact(Artifact::Report)
            .with_payload(payload)
            .with_hint(hint);
        self.state.append(msg, &next.into_iter().collect::<Vec<_>>());
        Ok(next)
    }

    fn nested_group(&mut self) -> Result<Option<Role>, Stop> {
        let (cmd, cmr) = (Role::ConceptualDesigner, Role::ConceptualReviewer);
        let mut best: Option<ConceptualModel> = None;
        let mut approved = false;
        let mut iterations = 0;
        while iterations < self.cfg.nested_cap {
            iterations += 1;
            let (body, reply) = self.turn(cmd, "", parse_cmd)?;
            let round = self.state.round;
            let (model, payload) = match reply {
                CmdReply::Clarify(payload) => {
                    self.nested_iterations.push(iterations);
                    let msg = Message::new(round, Sender::Agent(cmd), body, Visibility::Global)
                        .with_payload(Some(payload))
                        .with_hint(Some(Role::ProductManager));
                    self.state.append(msg, &[Role::ProductManager]);
                    return Ok(Some(Role::ProductManager));
                }
                CmdReply::Model(m, p) => (m, p),
            };
            let hint = validate_hint(cmd, hint_of(&payload), &self.profiles).filter(|r| *r == cmr);
            let msg = Message::new(round, Sender::Agent(cmd), body, Visibility::Nested)
                .with_payload(Some(payload))
                .with_hint(hint);
            self.state.append(msg, &[cmr]);

            let findings = review_conceptual_model(&model);
            best = Some(model);
            let (body, verdict) = self.turn(cmr, &findings_block(&findings), parse_cmr)?;
            let clean = !findings.iter().any(|f| f.severity == Severity::Error);
            approved = verdict.approved && clean;
            if verdict.approved && !clean {
                tracing::info!("reviewer approval overridden by automated findings");
            }
            let to = if approved { Role::LogicalDesigner } else { cmd };
            let msg = Message::new(self.state.round, Sender::Agent(cmr), body, Visibility::Nested)
                .with_payload(Some(verdict.payload))
                .with_hint(Some(to));
            self.state.append(msg, &[cmd]);
            if approved {
                break;
            }
            self.feedback += 1;
        }
        self.nested_iterations.push(iterations);
        let model = best.expect("nested cap is at least one");
        if !approved {
            self.flags.push(format!("conceptual model not approved after {iterations} nested iterations"));
        }
        let msg = Message::new(
            self.state.round,
            Sender::Tool("conceptual_model".into()),
            model.to_json_string(),
            Visibility::Global,
        )
        .with_artifact(Artifact::Model);
        self.state.append(msg, &[Role::LogicalDesigner]);
        self.model = Some(model);
        Ok(Some(Role::LogicalDesigner))
    }

    /// Posts a tool failure as a request to regenerate the conceptual model.
    fn back_to_cmd(&mut self, tool: &str, text: String) -> Option<Role> {
        let msg = Message::new(self.state.round, Sender::Tool(tool.into()), text, Visibility::Global)
            .with_hint(Some(Role::ConceptualDesigner));
        self.state.append(msg, &[Role::ConceptualDesigner, Role::LogicalDesigner]);
        self.feedback += 1;
        Some(Role::ConceptualDesigner)
    }

    fn lmd(&mut self) -> Result<Option<Role>, Stop> {
        let role = Role::LogicalDesigner;
        let Some(mut model) = self.model.clone() else {
            return Ok(self.back_to_cmd("candidate_keys", "no conceptual model is available yet".into()));
        };
        let (body, reply) = self.turn(role, "", parse_lmd)?;
        let hint = validate_hint(role, hint_of(&reply.payload), &self.profiles);
        let errors = reply.errors.clone();
        let msg = Message::new(self.state.round, Sender::Agent(role), body, Visibility::Global)
            .with_payload(Some(reply.payload))
            .with_hint(hint);
        if !errors.is_empty() {
            let next = hint.unwrap_or(Role::ConceptualDesigner);
            self.state.append(msg, &[next]);
            self.feedback += 1;
            return Ok(Some(next));
        }
        self.state.append(msg, &[]);

        for (set, fds) in reply.fds {
            if let Some(e) = model.entity_sets.iter_mut().find(|e| e.name == set) {
                e.fds.extend(fds);
            } else if let Some(r) = model.relationship_sets.iter_mut().find(|r| r.name == set) {
                r.fds.extend(fds);
            } else {
                let text = format!("error: functional dependencies name unknown set `{set}`");
                return Ok(self.back_to_cmd("candidate_keys", text));
            }
        }
        let outcome = lmd_tool_calls(&model);
        let n = outcome.calls.len();
        for (i, call) in outcome.calls.into_iter().enumerate() {
            let last = i + 1 == n;
            if last && outcome.result.is_err() {
                let text =
                    format!("{}\nThe conceptual design is invalid; regenerate the conceptual model.", call.output);
                return Ok(self.back_to_cmd(call.tool, text));
            }
            let mut msg =
                Message::new(self.state.round, Sender::Tool(call.tool.into()), call.output, Visibility::Global);
            if last {
                msg = msg.with_artifact(Artifact::Schema);
            }
            self.state.append(msg, &[role]);
        }
        match outcome.result {
            Ok(design) => {
                self.design = Some(design);
                self.model = Some(model);
                let next = hint.unwrap_or(Role::QaEngineer);
                if next == Role::ConceptualDesigner {
                    self.feedback += 1;
                }
                Ok(Some(next))
            }
            // map_to_logical failed before normalize_logical could log
            Err(e) => Ok(self.back_to_cmd(
                "normalize_logical",
                format!("error: {e}\nThe conceptual design is invalid; regenerate the conceptual model."),
            )),
        }
    }

    fn qae(&mut self) -> Result<Option<Role>, Stop> {
        let role = Role::QaEngineer;
        let (body, payload) = self.turn(role, "", |t| Ok(extract_structured(t).ok()))?;
        let hint = payload.as_ref().and_then(|p| validate_hint(role, hint_of(p), &self.profiles));
        let next = hint.or(role.forward());
        let msg = Message::new(self.state.round, Sender::Agent(role), body, Visibility::Global)
            .with_artifact(Artifact::TestCases)
            .with_payload(payload)
            .with_hint(hint);
        self.state.append(msg, &next.into_iter().collect::<Vec<_>>());
        Ok(next)
    }

    fn te(&mut self) -> Result<Option<Role>, Stop> {
        let role = Role::TestExecutor;
        let checks = self.automated_checks();
        let (body, payload) = self.turn(role, &checks, |t| Ok(extract_structured(t).ok()))?;
        if body.contains("TERMINAL") {
            let msg =
                Message::new(self.state.round, Sender::Agent(role), body, Visibility::Global).with_payload(payload);
            self.state.append(msg, &[]);
            self.state.terminated = true;
            return Ok(None);
        }
        let hint = payload.as_ref().and_then(|p| validate_hint(role, hint_of(p), &self.profiles));
        if hint.is_some() {
            self.feedback += 1;
        }
        let next = hint.or(role.forward());
        let msg = Message::new(self.state.round, Sender::Agent(role), body, Visibility::Global)
            .with_payload(payload)
            .with_hint(hint);
        self.state.append(msg, &next.into_iter().collect::<Vec<_>>());
        Ok(next)
    }

    /// Validation and per-table 3NF results for the TE prompt.
    fn automated_checks(&self) -> String {
        let Some(d) = &self.design else {
            return "Automated checks: no schema has been produced.".into();
        };
        let mut out = vec!["Automated checks:".to_string()];
        let report = validate_schema(&d.schema);
        if report.is_ok() {
            out.push("- schema validation: ok".into());
        } else {
            out.push(format!("- schema validation failed:\n{report}"));
        }
        for r in d.schema.relations() {
            let line = match d.table_fds(&r.id) {
                Ok(f) if is_3nf(&f).is_3nf() => format!("- {}: 3NF", r.name),
                Ok(_) => format!("- {}: not in 3NF", r.name),
                Err(e) => format!("- {}: {e}", r.name),
            };
            out.push(line);
        }
        out.join("\n")
    }
}

fn findings_block(findings: &[Finding]) -> String {
    if findings.is_empty() {
        return "Automated findings: none.".into();
    }
    let mut s = String::from("Automated findings (errors must be fixed before approval):");
    for f in findings {
        s.push_str(&format!("\n- {f}"));
    }
    s
}

fn parse_cmd(text: &str) -> Result<CmdReply, String> {
    let v = extract_structured(text)?;
    let has_model = v.get("output").is_some() || v.get("Entity Set").is_some();
    if has_model {
        let m = ConceptualModel::from_json(&v).map_err(|e| e.to_string())?;
        return Ok(CmdReply::Model(m, v));
    }
    match hint_of(&v).and_then(|h| h.parse::<Role>().ok()) {
        Some(Role::ProductManager) => Ok(CmdReply::Clarify(v)),
        _ => Err("reply holds neither a conceptual model nor a question for the product manager".into()),
    }
}

fn parse_cmr(text: &str) -> Result<CmrVerdict, String> {
    let v = extract_structured(text)?;
    let approved = if let Some(b) = v.get("approved").and_then(Value::as_bool) {
        b
    } else if let Some(s) = v.get("verdict").and_then(Value::as_str) {
        s.to_ascii_lowercase().starts_with("approve")
    } else {
        match hint_of(&v).and_then(|h| h.parse::<Role>().ok()) {
            Some(Role::LogicalDesigner) => true,
            Some(Role::ConceptualDesigner) => false,
            _ => return Err("reply carries no verdict (`approved`)".into()),
        }
    };
    Ok(CmrVerdict { approved, payload: v })
}

fn parse_lmd(text: &str) -> Result<LmdReply, String> {
    let v = extract_structured(text)?;
    if !v.is_object() {
        return Err("expected a JSON object".into());
    }
    let mut fds = Vec::new();
    if let Some(map) = v.get("Functional Dependencies").or_else(|| v.get("functional_dependencies")) {
        let map = map.as_object().ok_or("`Functional Dependencies` must map set names to lists")?;
        for (set, list) in map {
            let parsed = crate::er::parse_fds(set, Some(list)).map_err(|e| e.to_string())?;
            fds.push((set.clone(), parsed));
        }
    }
    let errors = match v.get("errors") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(a)) => {
            a.iter().map(|e| e.as_str().map(str::to_string).unwrap_or_else(|| e.to_string())).collect()
        }
        Some(Value::String(s)) if s.trim().is_empty() => Vec::new(),
        Some(Value::String(s)) => vec![s.clone()],
        Some(other) => return Err(format!("`errors` must be a list, got {other}")),
    };
    Ok(LmdReply { fds, errors, payload: v })
}
