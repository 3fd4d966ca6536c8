//! Scoring a predicted schema against a gold one: fuzzy name alignment,
//! table/attribute F1 and accuracy, key and type accuracy, plus a
//! model-graded rubric.

mod align;
mod judge;
mod metrics;
mod names;
mod report;

pub use align::{align, identity_alignment, Alignment};
pub use judge::{judge, parse_judge_output, render_judge_prompt, JudgeError, JudgeScore};
pub use metrics::{
    attribute_metrics, datatype_metrics, evaluate, f1_from_counts, key_metrics, table_metrics, EvalReport,
};
pub use names::{
    lcs_ratio, longest_common_substring, names_match, normalize_name, Lexicon, MatcherConfig, SimilarityProvider,
    SynonymProvider, TrigramCosine,
};
pub use report::{evaluate_pairs, CorpusReport, EvalPair, SampleRow};
