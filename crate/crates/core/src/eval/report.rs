//! Per-sample metric rows, corpus means and their CSV / JSON forms.

use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, EvalReport};
use super::names::MatcherConfig;
use crate::schema::Schema;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub sample: String,
    /// Pipeline outcome, or `given` when the prediction was supplied.
    pub status: String,
    pub metrics: EvalReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge_overall: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received_feedback: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub samples: Vec<SampleRow>,
    pub mean: EvalReport,
    /// Share of samples that got any feedback during generation, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge_mean: Option<f64>,
}

impl CorpusReport {
    pub fn from_rows(samples: Vec<SampleRow>) -> Self {
        let metrics: Vec<EvalReport> = samples.iter().map(|r| r.metrics).collect();
        let fb: Vec<bool> = samples.iter().filter_map(|r| r.received_feedback).collect();
        let judged: Vec<f64> = samples.iter().filter_map(|r| r.judge_overall).collect();
        let rate = |n: usize, d: usize| (d > 0).then(|| n as f64 / d as f64);
        Self {
            mean: EvalReport::mean(&metrics),
            feedback_rate: rate(fb.iter().filter(|b| **b).count(), fb.len()),
            judge_mean: (!judged.is_empty()).then(|| judged.iter().sum::<f64>() / judged.len() as f64),
            samples,
        }
    }

    /// One row per sample plus a final `mean` row.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["sample", "status"];
        header.extend(EvalReport::COLUMNS);
        header.extend(["judge_overall", "rounds", "received_feedback"]);
        w.write_record(&header)?;
        let fmt = |v: f64| format!("{v:.4}");
        for r in &self.samples {
            let mut rec = vec![r.sample.clone(), r.status.clone()];
            rec.extend(r.metrics.values().map(fmt));
            rec.push(r.judge_overall.map(fmt).unwrap_or_default());
            rec.push(r.rounds.map(|x| x.to_string()).unwrap_or_default());
            rec.push(r.received_feedback.map(|x| x.to_string()).unwrap_or_default());
            w.write_record(&rec)?;
        }
        let mut rec = vec!["mean".to_string(), String::new()];
        rec.extend(self.mean.values().map(fmt));
        rec.push(self.judge_mean.map(fmt).unwrap_or_default());
        rec.push(String::new());
        rec.push(self.feedback_rate.map(fmt).unwrap_or_default());
        w.write_record(&rec)?;
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A gold schema with the prediction to score against it.
#[derive(Debug, Clone)]
pub struct EvalPair {
    pub sample: String,
    pub gold: Schema,
    pub pred: Schema,
}

/// Scores pairs on a pool of `workers` threads; row order follows input.
pub fn evaluate_pairs(pairs: &[EvalPair], cfg: &MatcherConfig, workers: usize) -> CorpusReport {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let rows = pool.install(|| {
        pairs
            .par_iter()
            .map(|p| SampleRow {
                sample: p.sample.clone(),
                status: "given".into(),
                metrics: evaluate(&p.gold, &p.pred, cfg),
                judge_overall: None,
                rounds: None,
                received_feedback: None,
            })
            .collect()
    });
    CorpusReport::from_rows(rows)
}
