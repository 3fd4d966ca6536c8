use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::agents::{extract_structured, prompts, Backend, BackendError, BackendRequest};
use crate::schema::Schema;

/// Three 1-10 rubric scores and their weighted mean (0.4 / 0.3 / 0.3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JudgeScore {
    pub functional_coverage: u8,
    pub redundancy_normalization: u8,
    pub integrity_constraints: u8,
    pub overall: f64,
}

impl JudgeScore {
    pub fn new(coverage: u8, redundancy: u8, integrity: u8) -> Result<Self, String> {
        for (name, v) in [
            ("functional_coverage", coverage),
            ("redundancy_normalization", redundancy),
            ("integrity_constraints", integrity),
        ] {
            if !(1..=10).contains(&v) {
                return Err(format!("{name} = {v} is outside 1..=10"));
            }
        }
        // integer numerator keeps e.g. (10, 5, 5) at exactly 7.0
        let overall = f64::from(4 * u32::from(coverage) + 3 * u32::from(redundancy) + 3 * u32::from(integrity)) / 10.0;
        Ok(Self {
            functional_coverage: coverage,
            redundancy_normalization: redundancy,
            integrity_constraints: integrity,
            overall,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgeError {
    #[error("judge failed after {attempts} attempts: {diagnostic}")]
    Unparsable { attempts: u32, diagnostic: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

fn score_field(v: &Value, key: &str) -> Result<u8, String> {
    let raw = v.get(key).ok_or_else(|| format!("missing `{key}`"))?;
    let n = match raw {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    }
    .ok_or_else(|| format!("`{key}` is not a number"))?;
    if n.fract() != 0.0 || !(1.0..=10.0).contains(&n) {
        return Err(format!("`{key}` = {n} is not an integer in 1..=10"));
    }
    Ok(n as u8)
}

pub fn parse_judge_output(text: &str) -> Result<JudgeScore, String> {
    let v = extract_structured(text)?;
    JudgeScore::new(
        score_field(&v, "functional_coverage")?,
        score_field(&v, "redundancy_normalization")?,
        score_field(&v, "integrity_constraints")?,
    )
}

pub fn render_judge_prompt(schema: &Schema, requirement: &str) -> String {
    let schema_text = crate::schema::serialize_schema(schema).unwrap_or_else(|e| format!("<invalid schema: {e}>"));
    prompts::JUDGE.replace("{requirement}", requirement).replace("{schema}", &schema_text)
}

/// Asks the backend (role `judge`) to grade a schema, re-asking up to
/// `attempts` times in total when the reply cannot be parsed.
pub fn judge(
    schema: &Schema,
    requirement: &str,
    backend: &dyn Backend,
    attempts: u32,
    sampling: (f64, f64),
) -> Result<JudgeScore, JudgeError> {
    let prompt = render_judge_prompt(schema, requirement);
    let mut diagnostic = String::from("no attempt made");
    for attempt in 1..=attempts {
        let req = BackendRequest {
            role: "judge".into(),
            round: 0,
            turn: 1,
            attempt,
            prompt: prompt.clone(),
            temperature: sampling.0,
            top_p: sampling.1,
        };
        let resp = backend.complete(&req)?;
        match parse_judge_output(&resp.text) {
            Ok(s) => return Ok(s),
            Err(e) => {
                tracing::warn!(attempt, error = %e, "unusable judge reply");
                diagnostic = e;
            }
        }
    }
    Err(JudgeError::Unparsable { attempts, diagnostic })
}
