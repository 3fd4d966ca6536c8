//! Requirement/schema pairs, one JSON object per line:
//! `{"id", "domain", "requirement", "schema"}` where `schema` is the
//! canonical schema document.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{run_pipeline, Backend, BackendError, PipelineConfig, PipelineError, PipelineResult, Script};
use crate::schema::{validate_schema, Schema};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSample {
    pub id: String,
    pub domain: String,
    pub requirement: String,
    pub schema: Schema,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sample `{id}`: gold schema is invalid:\n{report}")]
    InvalidGold { id: String, report: String },
    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),
}

/// Parses a corpus, skipping blank lines. Every gold schema must validate.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusSample>, CorpusError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let s: CorpusSample =
            serde_json::from_str(line).map_err(|e| CorpusError::Parse { line: i + 1, message: e.to_string() })?;
        let report = validate_schema(&s.schema);
        if !report.is_ok() {
            return Err(CorpusError::InvalidGold { id: s.id, report: report.to_string() });
        }
        if !seen.insert(s.id.clone()) {
            return Err(CorpusError::DuplicateId(s.id));
        }
        out.push(s);
    }
    Ok(out)
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusSample>, CorpusError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    parse_corpus(&text)
}

pub fn to_jsonl(samples: &[CorpusSample]) -> String {
    samples.iter().map(|s| serde_json::to_string(s).expect("sample serializes") + "\n").collect()
}

const BUNDLED_SAMPLES: &str = include_str!("../corpus/samples.jsonl");

const BUNDLED_SCRIPTS: &[(&str, &str)] = &[
    ("warehouse", include_str!("../corpus/scripts/warehouse.json")),
    ("school", include_str!("../corpus/scripts/school.json")),
    ("library", include_str!("../corpus/scripts/library.json")),
    ("company", include_str!("../corpus/scripts/company.json")),
    ("hospital", include_str!("../corpus/scripts/hospital.json")),
    ("online_shop", include_str!("../corpus/scripts/online_shop.json")),
    ("airline", include_str!("../corpus/scripts/airline.json")),
    ("social", include_str!("../corpus/scripts/social.json")),
    ("supply", include_str!("../corpus/scripts/supply.json")),
    ("pharmacy", include_str!("../corpus/scripts/pharmacy.json")),
];

/// The ten desk-scale samples shipped with the crate.
pub fn bundled_corpus() -> Vec<CorpusSample> {
    parse_corpus(BUNDLED_SAMPLES).expect("bundled corpus is valid")
}

/// Scripted replies that drive the pipeline for a bundled sample.
pub fn bundled_script(id: &str) -> Option<Script> {
    BUNDLED_SCRIPTS
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, text)| serde_json::from_str(text).expect("bundled script is valid"))
}

pub type BackendFactory<'a> = dyn Fn(&CorpusSample) -> Result<Arc<dyn Backend>, BackendError> + Sync + 'a;

#[derive(Debug)]
pub enum GenerationOutcome {
    Done(Box<PipelineResult>),
    /// The run could not start (no backend, bad input).
    NotRun(String),
}

/// Runs the pipeline for every sample on `workers` threads. Results follow
/// input order.
pub fn generate_corpus(
    samples: &[CorpusSample],
    backend_for: &BackendFactory<'_>,
    cfg: &PipelineConfig,
    workers: usize,
) -> Vec<GenerationOutcome> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    pool.install(|| {
        samples
            .par_iter()
            .map(|s| {
                let backend = match backend_for(s) {
                    Ok(b) => b,
                    Err(e) => return GenerationOutcome::NotRun(e.to_string()),
                };
                match run_pipeline(&s.requirement, backend.as_ref(), cfg) {
                    Ok(r) => GenerationOutcome::Done(Box::new(r)),
                    Err(PipelineError::EmptyRequirement) => GenerationOutcome::NotRun("requirement is empty".into()),
                    Err(e) => GenerationOutcome::NotRun(e.to_string()),
                }
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_is_valid_and_scripted() {
        let c = bundled_corpus();
        assert_eq!(c.len(), 10);
        let domains: BTreeSet<_> = c.iter().map(|s| s.domain.as_str()).collect();
        assert!(domains.len() >= 3);
        for s in &c {
            assert!(bundled_script(&s.id).is_some(), "{}", s.id);
        }
        assert_eq!(parse_corpus(&to_jsonl(&c)).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let good = to_jsonl(&bundled_corpus()[..1]);
        let text = format!("{good}\n{{broken\n");
        assert!(matches!(parse_corpus(&text), Err(CorpusError::Parse { line: 3, .. })));
        let dup = format!("{good}{good}");
        assert!(matches!(parse_corpus(&dup), Err(CorpusError::DuplicateId(_))));
    }

    #[test]
    fn bundled_scripts_converge() {
        use crate::agents::{ScriptedBackend, Status};
        let c = bundled_corpus();
        let factory = |s: &CorpusSample| -> Result<Arc<dyn Backend>, BackendError> {
            Ok(Arc::new(ScriptedBackend::new(bundled_script(&s.id).expect("script"))))
        };
        let out = generate_corpus(&c, &factory, &PipelineConfig::default(), 4);
        for (s, o) in c.iter().zip(&out) {
            let GenerationOutcome::Done(r) = o else { panic!("{}: {o:?}", s.id) };
            assert_eq!(r.status, Status::Converged, "{}: {:?}", s.id, r.flags);
            let pred = r.schema.as_ref().unwrap();
            let m = crate::eval::evaluate(&s.schema, pred, &crate::eval::MatcherConfig::default());
            assert!(m.table_f1 > 0.5, "{}: {m:?}", s.id);
        }
    }
}
