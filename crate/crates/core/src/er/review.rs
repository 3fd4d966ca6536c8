use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::model::{ConceptualModel, ErAttribute, ErFd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewRule {
    /// A relationship set carries its own identifier attribute.
    RelationshipIdentifier,
    /// A participant names an entity set that does not exist.
    DanglingParticipant,
    /// A cardinality mark is missing or not ONE/MANY.
    Cardinality,
    /// An entity set has no attributes.
    EmptyEntity,
    /// Duplicate names, fewer than two participants, keys or FDs over
    /// unknown attributes.
    Structure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub rule: ReviewRule,
    pub location: String,
    pub message: String,
    pub suggestion: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "[{sev}] {}: {} (suggestion: {})", self.location, self.message, self.suggestion)
    }
}

/// Identifier-looking attribute name: `id` itself, or a name ending in
/// `id` at a word boundary (`_id`, ` id`, `-id`, `Id`, `ID`). The boundary
/// keeps words such as "paid" or "valid" from being flagged.
pub fn is_identifier_like(name: &str) -> bool {
    let chars: Vec<char> = name.trim().chars().collect();
    let norm: String =
        chars.iter().filter(|c| !matches!(c, '_' | '-') && !c.is_whitespace()).flat_map(|c| c.to_lowercase()).collect();
    if norm == "id" {
        return true;
    }
    let n = chars.len();
    if n < 3 || !norm.ends_with("id") {
        return false;
    }
    let (p, i, d) = (chars[n - 3], chars[n - 2], chars[n - 1]);
    if !i.eq_ignore_ascii_case(&'i') || !d.eq_ignore_ascii_case(&'d') {
        return false;
    }
    matches!(p, '_' | '-') || p.is_whitespace() || (i == 'I' && (d == 'D' || p.is_lowercase()))
}

fn finding(rule: ReviewRule, location: String, message: String, suggestion: impl Into<String>) -> Finding {
    Finding { severity: Severity::Error, rule, location, message, suggestion: suggestion.into() }
}

fn duplicate_attrs(owner: &str, attrs: &[ErAttribute], out: &mut Vec<Finding>) {
    let mut seen = BTreeSet::new();
    for a in attrs {
        if !seen.insert(a.name.as_str()) {
            out.push(finding(
                ReviewRule::Structure,
                format!("{owner}.{}", a.name),
                format!("attribute `{}` is declared twice", a.name),
                "keep a single declaration",
            ));
        }
    }
}

fn unknown_names<'a>(names: impl IntoIterator<Item = &'a String>, known: &BTreeSet<&str>) -> Vec<&'a str> {
    names.into_iter().map(String::as_str).filter(|n| !known.contains(n)).collect()
}

fn check_fds(owner: &str, fds: &[ErFd], known: &BTreeSet<&str>, out: &mut Vec<Finding>) {
    for fd in fds {
        if fd.lhs.is_empty() || fd.rhs.is_empty() {
            out.push(finding(
                ReviewRule::Structure,
                owner.to_string(),
                "functional dependency with an empty side".into(),
                "state both the determinant and the dependent attributes",
            ));
        }
        for name in unknown_names(fd.lhs.iter().chain(&fd.rhs), known) {
            out.push(finding(
                ReviewRule::Structure,
                owner.to_string(),
                format!("functional dependency mentions unknown attribute `{name}`"),
                "use only attributes declared in this set",
            ));
        }
    }
}

/// Deterministic review of a conceptual model. An empty result means the
/// model passes every check.
pub fn review_conceptual_model(m: &ConceptualModel) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut entity_names = BTreeSet::new();
    for e in &m.entity_sets {
        let loc = format!("Entity Set `{}`", e.name);
        if e.name.trim().is_empty() {
            out.push(finding(ReviewRule::Structure, loc.clone(), "entity set without a name".into(), "name it"));
        }
        if !entity_names.insert(e.name.as_str()) {
            out.push(finding(
                ReviewRule::Structure,
                loc.clone(),
                format!("entity set `{}` is declared twice", e.name),
                "merge the duplicate declarations",
            ));
        }
        if e.attributes.is_empty() {
            out.push(finding(
                ReviewRule::EmptyEntity,
                loc.clone(),
                format!("entity set `{}` has no attributes", e.name),
                "add the attributes the requirement describes, including an identifying one",
            ));
        }
        duplicate_attrs(&loc, &e.attributes, &mut out);
        let known: BTreeSet<&str> = e.attributes.iter().map(|a| a.name.as_str()).collect();
        if let Some(key) = &e.key_hint {
            if key.is_empty() {
                out.push(finding(
                    ReviewRule::Structure,
                    loc.clone(),
                    "primary key is empty".into(),
                    "name at least one key attribute or omit the key",
                ));
            }
            for name in unknown_names(key, &known) {
                out.push(finding(
                    ReviewRule::Structure,
                    loc.clone(),
                    format!("primary key mentions unknown attribute `{name}`"),
                    "choose key attributes from the entity's own attributes",
                ));
            }
        }
        check_fds(&loc, &e.fds, &known, &mut out);
    }

    let mut rel_names = BTreeSet::new();
    for r in &m.relationship_sets {
        let loc = format!("Relationship Set `{}`", r.name);
        if !rel_names.insert(r.name.as_str()) {
            out.push(finding(
                ReviewRule::Structure,
                loc.clone(),
                format!("relationship set `{}` is declared twice", r.name),
                "merge the duplicate declarations",
            ));
        }
        for a in &r.attributes {
            if is_identifier_like(&a.name) {
                out.push(finding(
                    ReviewRule::RelationshipIdentifier,
                    format!("{loc}.{}", a.name),
                    format!(
                        "relationship attribute `{}` is an identifier; relationship sets must not contain IDs",
                        a.name
                    ),
                    "remove it; the participants' keys identify the relationship",
                ));
            }
        }
        if r.participants.len() < 2 {
            out.push(finding(
                ReviewRule::Structure,
                loc.clone(),
                format!("relationship set has {} participant(s)", r.participants.len()),
                "a relationship associates at least two entity sets (or one entity set twice)",
            ));
        }
        for p in &r.participants {
            if m.entity(&p.entity).is_none() {
                out.push(finding(
                    ReviewRule::DanglingParticipant,
                    format!("{loc} -> {}", p.entity),
                    format!("participant `{}` is not a declared entity set", p.entity),
                    "reference an existing entity set or declare it",
                ));
            }
            if p.cardinality().is_none() {
                let message = match &p.mark {
                    None => format!("participant `{}` has no cardinality", p.entity),
                    Some(mark) => format!("participant `{}` has invalid cardinality `{mark}`", p.entity),
                };
                out.push(finding(
                    ReviewRule::Cardinality,
                    format!("{loc} -> {}", p.entity),
                    message,
                    "use ONE or MANY",
                ));
            }
        }
        duplicate_attrs(&loc, &r.attributes, &mut out);
        let mut known: BTreeSet<&str> = r.attributes.iter().map(|a| a.name.as_str()).collect();
        for p in &r.participants {
            if let Some(e) = m.entity(&p.entity) {
                known.extend(e.attributes.iter().map(|a| a.name.as_str()));
            }
        }
        check_fds(&loc, &r.fds, &known, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::school;
    use super::super::model::*;
    use super::*;
    use crate::schema::DataType;

    #[test]
    fn identifier_likeness() {
        for yes in ["id", "ID", "enrollment_id", "userId", "UserID", "order id", "ref-id"] {
            assert!(is_identifier_like(yes), "{yes}");
        }
        for no in ["paid", "valid", "grade", "idea", "ids", "Paid"] {
            assert!(!is_identifier_like(no), "{no}");
        }
    }

    #[test]
    fn clean_model_passes() {
        assert_eq!(review_conceptual_model(&school()), vec![]);
    }

    #[test]
    fn relationship_id_is_flagged() {
        let mut m = school();
        m.relationship_sets[0].attributes.push(ErAttribute::new("enrollment_id", DataType::Numeric));
        let f = review_conceptual_model(&m);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule, ReviewRule::RelationshipIdentifier);
        assert_eq!(f[0].severity, Severity::Error);
    }

    #[test]
    fn dangling_and_cardinality() {
        let mut m = school();
        m.relationship_sets[0].participants[1].entity = "Teacherr".into();
        m.relationship_sets[0].participants[0].mark = None;
        let rules: Vec<ReviewRule> = review_conceptual_model(&m).iter().map(|f| f.rule).collect();
        assert_eq!(rules, vec![ReviewRule::Cardinality, ReviewRule::DanglingParticipant]);

        let mut m = school();
        m.relationship_sets[0].participants[0].mark = Some("SOME".into());
        let f = review_conceptual_model(&m);
        assert!(f[0].message.contains("invalid cardinality `SOME`"));
    }

    #[test]
    fn empty_entity_and_structure() {
        let mut m = school();
        m.entity_sets.push(EntitySet::new("Room", vec![]));
        m.entity_sets[0].key_hint = Some(vec!["nope".into()]);
        m.relationship_sets[0].participants.pop();
        let rules: Vec<ReviewRule> = review_conceptual_model(&m).iter().map(|f| f.rule).collect();
        assert!(rules.contains(&ReviewRule::EmptyEntity));
        assert_eq!(rules.iter().filter(|r| **r == ReviewRule::Structure).count(), 2);
    }
}
