mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use schemaforge::corpus::bundled_corpus;
use schemaforge::eval::{
    align, evaluate, identity_alignment, names_match, EvalReport, MatcherConfig, SimilarityProvider, SynonymProvider,
};
use schemaforge::{Schema, TableId};

fn all_ones(r: &EvalReport) -> bool {
    r.values().iter().all(|v| *v == 1.0)
}

/// Drops a table together with everything that refers to its columns.
fn without_table(s: &Schema, t: &TableId) -> Schema {
    let mut p = s.clone().into_parts();
    let gone: BTreeSet<_> = p.attributes.iter().filter(|a| &a.table == t).map(|a| a.id.clone()).collect();
    p.relations.retain(|r| &r.id != t);
    p.attributes.retain(|a| &a.table != t);
    p.primary_keys.retain(|k| &k.table != t);
    p.foreign_keys.retain(|fk| !gone.contains(&fk.from) && !gone.contains(&fk.to));
    p.domain_constraints.retain(|d| !gone.contains(&d.attr));
    Schema::from_parts(p)
}

struct Abstain;

impl SynonymProvider for Abstain {
    fn synonyms(&self, _: &str) -> Option<BTreeSet<String>> {
        None
    }
}

impl SimilarityProvider for Abstain {
    fn similarity(&self, _: &str, _: &str) -> Option<f64> {
        None
    }
}

fn abstaining() -> MatcherConfig {
    MatcherConfig { synonyms: Some(Arc::new(Abstain)), similarity: Some(Arc::new(Abstain)), ..MatcherConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn self_evaluation_is_identity(s in common::schema()) {
        prop_assert!(all_ones(&EvalReport::from_alignment(&s, &s, &identity_alignment(&s))));
        prop_assert!(all_ones(&evaluate(&s, &s, &MatcherConfig::default())));
        prop_assert!(all_ones(&evaluate(&s, &s, &MatcherConfig::string_only())));
    }

    #[test]
    fn metrics_are_bounded_and_consistent(g in common::schema(), p in common::schema()) {
        for cfg in [MatcherConfig::default(), MatcherConfig::string_only()] {
            let r = evaluate(&g, &p, &cfg);
            for v in r.values() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            for acc in [r.table_acc, r.attr_acc, r.pk_acc, r.fk_acc] {
                prop_assert!(acc == 0.0 || acc == 1.0);
            }
            prop_assert!(r.table_acc == 0.0 || r.table_f1 == 1.0);
            prop_assert!(r.attr_acc == 0.0 || r.attr_f1 == 1.0);
        }
    }

    #[test]
    fn alignment_is_injective(g in common::schema(), p in common::schema()) {
        let a = align(&g, &p, &MatcherConfig::default());
        let preds: BTreeSet<_> = a.tables.iter().map(|(_, x)| x).collect();
        prop_assert_eq!(preds.len(), a.tables.len());
        let golds: BTreeSet<_> = a.tables.iter().map(|(x, _)| x).collect();
        prop_assert_eq!(golds.len(), a.tables.len());
        let attrs: Vec<_> = a.attributes.values().flatten().collect();
        let pa: BTreeSet<_> = attrs.iter().map(|(_, x)| x).collect();
        let ga: BTreeSet<_> = attrs.iter().map(|(x, _)| x).collect();
        prop_assert_eq!(pa.len(), attrs.len());
        prop_assert_eq!(ga.len(), attrs.len());
    }

    #[test]
    fn deleting_a_matched_table_never_raises_recall(g in common::schema(), p in common::schema(), pick in any::<usize>()) {
        let cfg = MatcherConfig::default();
        let a = align(&g, &p, &cfg);
        prop_assume!(!a.tables.is_empty());
        let victim = &a.tables[pick % a.tables.len()].1;
        let smaller = without_table(&p, victim);
        let after = align(&g, &smaller, &cfg);
        prop_assert!(after.tables.len() <= a.tables.len());
    }

    #[test]
    fn matching_is_reflexive_and_ignores_case_and_underscores(name in "[a-z]{1,8}(_[a-z]{1,6}){0,2}") {
        let shout = name.to_uppercase();
        let squashed = name.replace('_', "");
        let spaced = name.replace('_', " ");
        for cfg in [MatcherConfig::default(), MatcherConfig::string_only()] {
            prop_assert!(names_match(&name, &name, &cfg));
            prop_assert!(names_match(&shout, &name, &cfg));
            prop_assert!(names_match(&squashed, &name, &cfg));
            prop_assert!(names_match(&spaced, &shout, &cfg));
        }
    }

    #[test]
    fn abstaining_providers_behave_like_string_matching(g in common::schema(), p in common::schema()) {
        prop_assert_eq!(evaluate(&g, &p, &abstaining()), evaluate(&g, &p, &MatcherConfig::string_only()));
    }

    #[test]
    fn abstention_matches_names_like_string_only(a in "[a-z_]{0,10}", b in "[a-z_]{0,10}") {
        prop_assert_eq!(names_match(&a, &b, &abstaining()), names_match(&a, &b, &MatcherConfig::string_only()));
    }
}

#[test]
fn bundled_gold_self_evaluates_to_one() {
    for s in bundled_corpus() {
        let r = evaluate(&s.schema, &s.schema, &MatcherConfig::default());
        assert!(all_ones(&r), "{}: {r:?}", s.id);
    }
}

#[test]
fn providers_widen_matching() {
    let cfg = MatcherConfig::default();
    assert!(names_match("client", "customer", &cfg));
    assert!(!names_match("client", "customer", &MatcherConfig::string_only()));
    assert!(names_match("user", "users", &MatcherConfig::string_only()));
}
