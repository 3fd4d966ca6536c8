//! Fuzzy name matching: synonym lookup, a similarity score and a
//! normalized longest-common-substring ratio.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Returns the synonym set of a normalized word, or `None` when the
/// provider cannot answer (the method then abstains).
pub trait SynonymProvider: Send + Sync {
    fn synonyms(&self, word: &str) -> Option<BTreeSet<String>>;
}

/// Similarity in `[0, 1]` of two normalized names; `None` abstains.
pub trait SimilarityProvider: Send + Sync {
    fn similarity(&self, a: &str, b: &str) -> Option<f64>;
}

#[derive(Clone)]
pub struct MatcherConfig {
    /// Threshold for the similarity provider.
    pub delta0: f64,
    /// Threshold for the longest-common-substring ratio.
    pub delta1: f64,
    pub synonyms: Option<Arc<dyn SynonymProvider>>,
    pub similarity: Option<Arc<dyn SimilarityProvider>>,
}

impl fmt::Debug for MatcherConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatcherConfig")
            .field("delta0", &self.delta0)
            .field("delta1", &self.delta1)
            .field("synonyms", &self.synonyms.is_some())
            .field("similarity", &self.similarity.is_some())
            .finish()
    }
}

impl Default for MatcherConfig {
    /// Thresholds 0.6 / 0.75 with the bundled offline providers.
    fn default() -> Self {
        Self {
            delta0: 0.6,
            delta1: 0.75,
            synonyms: Some(Arc::new(Lexicon::builtin())),
            similarity: Some(Arc::new(TrigramCosine)),
        }
    }
}

impl MatcherConfig {
    /// Default thresholds, no providers: only substring matching runs.
    pub fn string_only() -> Self {
        Self { synonyms: None, similarity: None, ..Self::default() }
    }

    pub fn with_delta1(mut self, delta1: f64) -> Self {
        self.delta1 = delta1;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("delta0", self.delta0), ("delta1", self.delta1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Case-folds and drops underscores and whitespace.
pub fn normalize_name(s: &str) -> String {
    s.chars().filter(|c| *c != '_' && !c.is_whitespace()).flat_map(char::to_lowercase).collect()
}

/// Length in chars of the longest common substring.
pub fn longest_common_substring(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev = vec![0usize; b.len() + 1];
    let mut best = 0;
    for ca in &a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            if ca == cb {
                cur[j + 1] = prev[j] + 1;
                best = best.max(cur[j + 1]);
            }
        }
        prev = cur;
    }
    best
}

/// LCS length over the longer string's length, on normalized names. Two
/// empty names score 1.
pub fn lcs_ratio(a: &str, b: &str) -> f64 {
    let (a, b) = (normalize_name(a), normalize_name(b));
    let longer = a.chars().count().max(b.chars().count());
    if longer == 0 {
        return 1.0;
    }
    longest_common_substring(&a, &b) as f64 / longer as f64
}

pub fn names_match(predicted: &str, gold: &str, cfg: &MatcherConfig) -> bool {
    let (p, g) = (normalize_name(predicted), normalize_name(gold));
    if p == g {
        return true;
    }
    if let Some(set) = cfg.synonyms.as_ref().and_then(|s| s.synonyms(&p)) {
        if set.contains(&g) {
            return true;
        }
    }
    if let Some(score) = cfg.similarity.as_ref().and_then(|s| s.similarity(&p, &g)) {
        if score >= cfg.delta0 {
            return true;
        }
    }
    lcs_ratio(&p, &g) >= cfg.delta1
}

/// Small offline lexicon of schema vocabulary. Each group is a set of
/// mutually synonymous normalized words.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    index: BTreeMap<String, BTreeSet<String>>,
}

const GROUPS: &[&[&str]] = &[
    &["customer", "client", "buyer"],
    &["employee", "staff", "worker"],
    &["product", "item", "goods", "article"],
    &["order", "purchase"],
    &["supplier", "vendor", "provider"],
    &["teacher", "instructor", "lecturer", "professor"],
    &["student", "pupil", "learner"],
    &["department", "dept", "division"],
    &["address", "addr", "location"],
    &["phone", "telephone", "tel", "phonenumber", "mobile"],
    &["email", "emailaddress", "mail"],
    &["birthdate", "dob", "dateofbirth"],
    &["description", "desc", "details"],
    &["quantity", "qty", "amount"],
    &["price", "cost", "unitprice"],
    &["number", "no", "num"],
    &["identifier", "id"],
    &["warehouse", "depot", "storehouse"],
    &["cargo", "freight", "goodsitem"],
    &["user", "account", "member"],
    &["author", "writer"],
    &["doctor", "physician"],
    &["appointment", "booking", "reservation"],
];

impl Lexicon {
    pub fn builtin() -> Self {
        let mut lex = Self::default();
        for g in GROUPS {
            lex.add_group(g.iter().copied());
        }
        lex
    }

    pub fn add_group<'a>(&mut self, words: impl IntoIterator<Item = &'a str>) {
        let words: BTreeSet<String> = words.into_iter().map(normalize_name).collect();
        for w in &words {
            let entry = self.index.entry(w.clone()).or_default();
            entry.extend(words.iter().filter(|x| *x != w).cloned());
        }
    }
}

impl SynonymProvider for Lexicon {
    fn synonyms(&self, word: &str) -> Option<BTreeSet<String>> {
        Some(self.index.get(word).cloned().unwrap_or_default())
    }
}

/// Cosine similarity of character-trigram count vectors, with the names
/// padded so that word boundaries count.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrigramCosine;

fn trigrams(s: &str) -> BTreeMap<[char; 3], u32> {
    let padded: Vec<char> = "  ".chars().chain(s.chars()).chain(" ".chars()).collect();
    let mut out = BTreeMap::new();
    for w in padded.windows(3) {
        *out.entry([w[0], w[1], w[2]]).or_insert(0) += 1;
    }
    out
}

impl SimilarityProvider for TrigramCosine {
    fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        if a.is_empty() || b.is_empty() {
            return Some(if a == b { 1.0 } else { 0.0 });
        }
        let (ta, tb) = (trigrams(a), trigrams(b));
        let dot: f64 = ta.iter().filter_map(|(k, x)| tb.get(k).map(|y| f64::from(*x) * f64::from(*y))).sum();
        let norm = |t: &BTreeMap<[char; 3], u32>| t.values().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
        Some(dot / (norm(&ta) * norm(&tb)))
    }
}
