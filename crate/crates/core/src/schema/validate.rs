use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use super::{AttrId, Schema, TableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    DuplicateTableId,
    EmptyTableName,
    EmptyRelation,
    DuplicateAttrId,
    EmptyAttrName,
    DuplicateColumnName,
    UnknownOwningTable,
    DuplicatePrimaryKey,
    EmptyPrimaryKey,
    PrimaryKeyUnknownTable,
    PrimaryKeyUnknownAttr,
    PrimaryKeyForeignAttr,
    ForeignKeyUnknownAttr,
    ForeignKeyTargetNotPrimary,
    ForeignKeyTypeMismatch,
    ConstraintUnknownAttr,
    DuplicateConstraint,
}

impl Rule {
    /// Rules broken by an identifier that points at nothing.
    pub fn is_dangling(self) -> bool {
        matches!(
            self,
            Rule::UnknownOwningTable
                | Rule::PrimaryKeyUnknownTable
                | Rule::PrimaryKeyUnknownAttr
                | Rule::ForeignKeyUnknownAttr
                | Rule::ConstraintUnknownAttr
        )
    }

    pub fn description(self) -> &'static str {
        match self {
            Rule::DuplicateTableId => "duplicate table id",
            Rule::EmptyTableName => "empty table name",
            Rule::EmptyRelation => "relation has no attributes",
            Rule::DuplicateAttrId => "duplicate attribute id",
            Rule::EmptyAttrName => "empty attribute name",
            Rule::DuplicateColumnName => "duplicate column name",
            Rule::UnknownOwningTable => "dangling reference: attribute owner table does not exist",
            Rule::DuplicatePrimaryKey => "more than one primary key for table",
            Rule::EmptyPrimaryKey => "empty primary key",
            Rule::PrimaryKeyUnknownTable => "dangling reference: primary key table does not exist",
            Rule::PrimaryKeyUnknownAttr => "dangling reference: primary key attribute does not exist",
            Rule::PrimaryKeyForeignAttr => "primary key attribute belongs to another table",
            Rule::ForeignKeyUnknownAttr => "dangling reference: foreign key attribute does not exist",
            Rule::ForeignKeyTargetNotPrimary => "FK target not a primary key attribute",
            Rule::ForeignKeyTypeMismatch => "foreign key type mismatch",
            Rule::ConstraintUnknownAttr => "dangling reference: constrained attribute does not exist",
            Rule::DuplicateConstraint => "duplicate domain constraint",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// The offending component, e.g. `attribute a7` or `foreign key a3->a1`.
    pub component: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.component, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_rule(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, component: String, rule: Rule, detail: Option<String>) {
        let message = match detail {
            Some(d) => format!("{}: {d}", rule.description()),
            None => rule.description().to_owned(),
        };
        self.violations.push(Violation { component, rule, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of the schema. Violations are reported
/// as data; an empty report means the schema is valid.
pub fn validate_schema(s: &Schema) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut tables: HashSet<&TableId> = HashSet::new();
    for r in s.relations() {
        let component = format!("relation {}", r.id);
        if !tables.insert(&r.id) {
            report.push(component.clone(), Rule::DuplicateTableId, None);
        }
        if r.name.trim().is_empty() {
            report.push(component, Rule::EmptyTableName, None);
        }
    }

    let mut attrs: BTreeMap<&AttrId, &super::Attribute> = BTreeMap::new();
    let mut columns: HashSet<(&TableId, &str)> = HashSet::new();
    let mut owned: HashSet<&TableId> = HashSet::new();
    for a in s.attributes() {
        let component = format!("attribute {}", a.id);
        if attrs.insert(&a.id, a).is_some() {
            report.push(component.clone(), Rule::DuplicateAttrId, None);
        }
        if a.name.trim().is_empty() {
            report.push(component.clone(), Rule::EmptyAttrName, None);
        }
        if !tables.contains(&a.table) {
            report.push(component.clone(), Rule::UnknownOwningTable, Some(a.table.to_string()));
        }
        owned.insert(&a.table);
        if !columns.insert((&a.table, a.name.as_str())) {
            report.push(component, Rule::DuplicateColumnName, Some(format!("{} in {}", a.name, a.table)));
        }
    }

    for r in s.relations() {
        if !owned.contains(&r.id) {
            report.push(format!("relation {}", r.id), Rule::EmptyRelation, None);
        }
    }

    let mut keyed: HashSet<&TableId> = HashSet::new();
    let mut key_attrs: BTreeSet<&AttrId> = BTreeSet::new();
    for pk in s.primary_keys() {
        let component = format!("primary key of {}", pk.table);
        if !keyed.insert(&pk.table) {
            report.push(component.clone(), Rule::DuplicatePrimaryKey, None);
        }
        if !tables.contains(&pk.table) {
            report.push(component.clone(), Rule::PrimaryKeyUnknownTable, None);
        }
        if pk.attrs.is_empty() {
            report.push(component.clone(), Rule::EmptyPrimaryKey, None);
        }
        for k in &pk.attrs {
            key_attrs.insert(k);
            match attrs.get(k) {
                None => report.push(component.clone(), Rule::PrimaryKeyUnknownAttr, Some(k.to_string())),
                Some(a) if a.table != pk.table => {
                    report.push(component.clone(), Rule::PrimaryKeyForeignAttr, Some(k.to_string()))
                }
                Some(_) => {}
            }
        }
    }

    for fk in s.foreign_keys() {
        let component = format!("foreign key {}->{}", fk.from, fk.to);
        let from = attrs.get(&fk.from);
        let to = attrs.get(&fk.to);
        for (id, found) in [(&fk.from, from), (&fk.to, to)] {
            if found.is_none() {
                report.push(component.clone(), Rule::ForeignKeyUnknownAttr, Some(id.to_string()));
            }
        }
        if to.is_some() && !key_attrs.contains(&fk.to) {
            report.push(component.clone(), Rule::ForeignKeyTargetNotPrimary, None);
        }
        if let (Some(f), Some(t)) = (from, to) {
            if f.data_type != t.data_type {
                report.push(
                    component,
                    Rule::ForeignKeyTypeMismatch,
                    Some(format!("{} vs {}", f.data_type, t.data_type)),
                );
            }
        }
    }

    let mut seen = HashSet::new();
    for dc in s.domain_constraints() {
        let component = format!("constraint {} on {}", dc.kind.as_str(), dc.attr);
        if !attrs.contains_key(&dc.attr) {
            report.push(component.clone(), Rule::ConstraintUnknownAttr, None);
        }
        if !seen.insert((&dc.attr, dc.kind)) {
            report.push(component, Rule::DuplicateConstraint, None);
        }
    }

    report
}
