//! Command-line surface. Exit codes: 0 success, 1 domain failure
//! (non-convergence, invalid schema, non-executable DDL), 2 usage or
//! configuration error.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::agents::{
    run_pipeline, Backend, BackendError, Config, HttpBackend, PipelineError, PipelineResult, Script, ScriptedBackend,
    Status,
};
use crate::corpus::{bundled_corpus, bundled_script, generate_corpus, load_corpus, CorpusSample, GenerationOutcome};
use crate::ddl::{emit_ddl, verify_executable};
use crate::eval::{evaluate_pairs, judge, CorpusReport, EvalPair, EvalReport, MatcherConfig, SampleRow};
use crate::fd::{
    candidate_keys, is_dependency_preserving, is_lossless, minimal_cover, parse_fd_problem, synthesize_3nf,
};
use crate::schema::{deserialize_schema, serialize_schema, validate_schema, Schema};

#[derive(Debug, Parser)]
#[command(name = "schemaforge", version, about = "Requirement-to-schema generation, normalization, evaluation and DDL")]
pub struct Cli {
    /// Log filter for stderr (e.g. `info`, `schemaforge=debug`).
    #[arg(long, global = true, default_value = "warn")]
    pub log: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the agent pipeline on one requirement or on a corpus.
    Generate(GenerateArgs),
    /// Score predicted schemas against a corpus.
    Evaluate(EvaluateArgs),
    /// Keys, minimal cover and 3NF synthesis for an FD problem file.
    Normalize(NormalizeArgs),
    /// Write SQLite DDL for a schema file.
    EmitDdl(EmitDdlArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Scripted,
    Http,
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value = "scripted")]
    pub backend: BackendKind,
    /// TOML file with `[http]` and `[pipeline]` tables.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Script for the scripted backend.
    #[arg(long)]
    pub script: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Requirement text.
    pub requirement: Option<String>,
    #[arg(long, conflicts_with = "requirement")]
    pub requirement_file: Option<PathBuf>,
    /// Corpus file, or `bundled`, to generate every sample.
    #[arg(long, conflicts_with_all = ["requirement", "requirement_file"])]
    pub corpus: Option<String>,
    /// Directory of `<id>.json` scripts for a corpus run with the scripted backend.
    #[arg(long)]
    pub scripts: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Corpus file, or `bundled`.
    #[arg(long)]
    pub corpus: String,
    /// Directory holding `<id>.json` predicted schemas.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Directory for `report.csv` and `report.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    #[arg(long, default_value_t = 0.6)]
    pub delta0: f64,
    #[arg(long, default_value_t = 0.75)]
    pub delta1: f64,
    /// Disable the synonym and similarity providers.
    #[arg(long)]
    pub string_only: bool,
    /// Also grade each prediction with the judge rubric.
    #[arg(long)]
    pub judge: bool,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmitDdlArgs {
    pub schema: PathBuf,
    /// Output `.sql` path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Execute the DDL in SQLite; exit 1 when it fails.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Runs a parsed command, returning the exit code. Results go to stdout
/// and files; diagnostics to stderr.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Normalize(a) => normalize(a),
        Command::EmitDdl(a) => emit(a),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_config(args: &BackendArgs) -> Result<Config, CliError> {
    match &args.config {
        Some(p) => Config::load(p).map_err(usage),
        None => Ok(Config::default()),
    }
}

fn load_script(path: &Path) -> Result<Script, CliError> {
    ScriptedBackend::from_file(path).map(|b| b.script().clone()).map_err(usage)
}

fn http_backend(cfg: &Config) -> Result<Arc<dyn Backend>, CliError> {
    Ok(Arc::new(HttpBackend::from_env(cfg.http.clone()).map_err(usage)?))
}

fn load_samples(spec: &str) -> Result<Vec<CorpusSample>, CliError> {
    if spec == "bundled" {
        Ok(bundled_corpus())
    } else {
        load_corpus(Path::new(spec)).map_err(usage)
    }
}

fn status_json(r: &PipelineResult) -> String {
    let doc = json!({
        "status": r.status,
        "converged": r.converged(),
        "rounds": r.rounds,
        "feedback_events": r.feedback_events,
        "nested_iterations": r.nested_iterations,
        "backend_calls": r.backend_calls,
        "flags": r.flags,
    });
    serde_json::to_string_pretty(&doc).expect("status serializes") + "\n"
}

/// Writes the schema (when valid), transcript and status of one run.
fn write_run(out: &Path, stem: &str, r: &PipelineResult) -> Result<(), CliError> {
    if let Some(text) = r.schema.as_ref().and_then(|s| serialize_schema(s).ok()) {
        write(&out.join("predictions").join(format!("{stem}.json")), &text)?;
    }
    write(&out.join("transcripts").join(format!("{stem}.json")), &r.transcript.to_json())?;
    write(&out.join("status").join(format!("{stem}.json")), &status_json(r))
}

fn generate(a: GenerateArgs) -> Result<bool, CliError> {
    let cfg = load_config(&a.backend)?;
    if let Some(spec) = &a.corpus {
        return generate_batch(&a, spec, &cfg);
    }
    let requirement = match (&a.requirement, &a.requirement_file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => read(p)?,
        _ => return Err(usage("give a requirement, --requirement-file or --corpus")),
    };
    if requirement.trim().is_empty() {
        return Err(usage("requirement is empty"));
    }
    let backend: Arc<dyn Backend> = match a.backend.backend {
        BackendKind::Http => http_backend(&cfg)?,
        BackendKind::Scripted => {
            let path = a.backend.script.as_ref().ok_or_else(|| usage("--backend scripted needs --script"))?;
            Arc::new(ScriptedBackend::new(load_script(path)?))
        }
    };
    let r = match run_pipeline(&requirement, backend.as_ref(), &cfg.pipeline) {
        Ok(r) => r,
        Err(e @ PipelineError::EmptyRequirement) | Err(e @ PipelineError::Config(_)) => return Err(usage(e)),
    };
    write_run(&a.out, "run", &r)?;
    println!("{}", describe_status(&r.status));
    if let Status::Failed(_) = r.status {
        return Err(CliError::Failure(describe_status(&r.status)));
    }
    Ok(r.converged())
}

fn describe_status(s: &Status) -> String {
    match s {
        Status::Converged => "converged".into(),
        Status::RoundCap => "not converged: round cap reached".into(),
        Status::EndedWithoutTerminal => "not converged: chat ended without TERMINAL".into(),
        Status::InvalidSchema(r) => format!("not converged: invalid schema: {r}"),
        Status::Failed(r) => format!("failed: {r}"),
    }
}

fn generate_batch(a: &GenerateArgs, spec: &str, cfg: &Config) -> Result<bool, CliError> {
    let samples = load_samples(spec)?;
    let shared_http = match a.backend.backend {
        BackendKind::Http => Some(http_backend(cfg)?),
        BackendKind::Scripted => None,
    };
    let scripts_dir = a.scripts.clone();
    let bundled = spec == "bundled";
    let factory = move |s: &CorpusSample| -> Result<Arc<dyn Backend>, BackendError> {
        if let Some(b) = &shared_http {
            return Ok(Arc::clone(b));
        }
        let script = match &scripts_dir {
            Some(dir) => ScriptedBackend::from_file(&dir.join(format!("{}.json", s.id)))?.script().clone(),
            None if bundled => bundled_script(&s.id)
                .ok_or_else(|| BackendError::Config(format!("no bundled script for `{}`", s.id)))?,
            None => return Err(BackendError::Config("scripted corpus runs need --scripts".into())),
        };
        Ok(Arc::new(ScriptedBackend::new(script)))
    };
    let outcomes = generate_corpus(&samples, &factory, &cfg.pipeline, a.workers);
    let mut summary = Vec::new();
    let mut all_ok = true;
    let mut feedback = 0usize;
    for (s, o) in samples.iter().zip(&outcomes) {
        let (status, converged, got_feedback) = match o {
            GenerationOutcome::Done(r) => {
                write_run(&a.out, &s.id, r)?;
                (describe_status(&r.status), r.converged(), r.received_feedback())
            }
            GenerationOutcome::NotRun(e) => (format!("not run: {e}"), false, false),
        };
        all_ok &= converged;
        feedback += usize::from(got_feedback);
        println!("{:<16} {status}", s.id);
        summary.push(json!({"id": s.id, "status": status, "converged": converged, "received_feedback": got_feedback}));
    }
    let rate = if samples.is_empty() { 0.0 } else { feedback as f64 / samples.len() as f64 };
    println!("samples receiving feedback: {feedback}/{} ({:.1}%)", samples.len(), 100.0 * rate);
    let doc = json!({"samples": summary, "feedback_rate": rate});
    write(&a.out.join("summary.json"), &(serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n"))?;
    Ok(all_ok)
}

enum Prediction {
    Ok(Schema),
    Missing,
    Malformed(String),
}

fn read_prediction(dir: &Path, id: &str) -> Prediction {
    let path = dir.join(format!("{id}.json"));
    let Ok(text) = fs::read_to_string(&path) else {
        return Prediction::Missing;
    };
    match deserialize_schema(&text) {
        Ok(s) if validate_schema(&s).is_ok() => Prediction::Ok(s),
        Ok(s) => Prediction::Malformed(validate_schema(&s).to_string()),
        Err(e) => Prediction::Malformed(e.to_string()),
    }
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<bool, CliError> {
    let samples = load_samples(&a.corpus)?;
    if !a.predictions.is_dir() {
        return Err(usage(format!("{} is not a directory", a.predictions.display())));
    }
    let base = if a.string_only { MatcherConfig::string_only() } else { MatcherConfig::default() };
    let matcher = MatcherConfig { delta0: a.delta0, delta1: a.delta1, ..base };
    matcher.validate().map_err(usage)?;

    let preds: Vec<Prediction> = samples.iter().map(|s| read_prediction(&a.predictions, &s.id)).collect();
    let pairs: Vec<EvalPair> = samples
        .iter()
        .zip(&preds)
        .filter_map(|(s, p)| match p {
            Prediction::Ok(pred) => Some(EvalPair { sample: s.id.clone(), gold: s.schema.clone(), pred: pred.clone() }),
            _ => None,
        })
        .collect();
    let scored = evaluate_pairs(&pairs, &matcher, a.workers);
    let mut scored = scored.samples.into_iter();

    let judge_backend = if a.judge { Some(judge_backend(&a.backend)?) } else { None };
    let sampling = load_config(&a.backend).map(|c| (c.pipeline.temperature, c.pipeline.top_p))?;
    let mut rows = Vec::new();
    for (s, p) in samples.iter().zip(&preds) {
        let row = match p {
            Prediction::Ok(pred) => {
                let mut row = scored.next().expect("one row per valid prediction");
                if let Some(b) = &judge_backend {
                    match judge(pred, &s.requirement, b.as_ref(), 3, sampling) {
                        Ok(j) => row.judge_overall = Some(j.overall),
                        Err(e) => {
                            eprintln!("warning: {}: {e}", s.id);
                            row.status = "judge_failed".into();
                        }
                    }
                }
                row
            }
            Prediction::Missing | Prediction::Malformed(_) => {
                let status = match p {
                    Prediction::Malformed(e) => {
                        eprintln!("warning: {}: malformed prediction: {e}", s.id);
                        "malformed"
                    }
                    _ => {
                        eprintln!("warning: {}: no prediction", s.id);
                        "missing"
                    }
                };
                SampleRow {
                    sample: s.id.clone(),
                    status: status.into(),
                    metrics: EvalReport::default(),
                    judge_overall: None,
                    rounds: None,
                    received_feedback: None,
                }
            }
        };
        rows.push(row);
    }
    let report = CorpusReport::from_rows(rows);
    let csv = report.to_csv().map_err(usage)?;
    print!("{csv}");
    if let Some(out) = &a.out {
        write(&out.join("report.csv"), &csv)?;
        write(&out.join("report.json"), &report.to_json())?;
    }
    Ok(true)
}

fn judge_backend(args: &BackendArgs) -> Result<Arc<dyn Backend>, CliError> {
    let cfg = load_config(args)?;
    match args.backend {
        BackendKind::Http => http_backend(&cfg),
        BackendKind::Scripted => {
            let path = args.script.as_ref().ok_or_else(|| usage("--judge with the scripted backend needs --script"))?;
            Ok(Arc::new(ScriptedBackend::new(load_script(path)?)))
        }
    }
}

fn normalize(a: NormalizeArgs) -> Result<bool, CliError> {
    let text = read(&a.file)?;
    let f = parse_fd_problem(&text).map_err(|e| CliError::Failure(format!("{}: {e}", a.file.display())))?;
    let join = |s: &crate::fd::AttrSet| s.iter().map(String::as_str).collect::<Vec<_>>().join(" ");
    let keys = candidate_keys(&f).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("candidate keys:");
    for k in &keys {
        println!("  {{{}}}", join(k));
    }
    println!("minimal cover:");
    for fd in minimal_cover(&f).fds() {
        println!("  {fd}");
    }
    let d = synthesize_3nf(&f).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("3NF fragments:");
    for (i, fr) in d.fragments.iter().enumerate() {
        let keys: Vec<String> = fr.keys.iter().map(|k| format!("{{{}}}", join(k))).collect();
        println!("  {}. {}  (keys: {})", i + 1, join(&fr.attrs), keys.join(", "));
    }
    let sets = d.attr_sets();
    let yes = |b: bool| if b { "yes" } else { "no" };
    let lossless = is_lossless(&f, &sets).map_err(|e| CliError::Failure(e.to_string()))?;
    let preserving = is_dependency_preserving(&f, &sets).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("lossless join: {}", yes(lossless));
    println!("dependency preserving: {}", yes(preserving));
    Ok(true)
}

fn emit(a: EmitDdlArgs) -> Result<bool, CliError> {
    let text = read(&a.schema)?;
    let schema = deserialize_schema(&text).map_err(|e| CliError::Failure(e.to_string()))?;
    let report = validate_schema(&schema);
    if !report.is_ok() {
        return Err(CliError::Failure(format!("schema is invalid:\n{report}")));
    }
    let ddl = emit_ddl(&schema).map_err(|e| CliError::Failure(e.to_string()))?;
    let sql = ddl.to_sql();
    match &a.out {
        Some(p) => write(p, &sql)?,
        None => print!("{sql}"),
    }
    if !a.verify {
        return Ok(true);
    }
    let v = verify_executable(&ddl).map_err(usage)?;
    for d in &v.diagnostics {
        eprintln!("{d}");
    }
    eprintln!("executable: {}", if v.ok { "yes" } else { "no" });
    Ok(v.ok)
}
