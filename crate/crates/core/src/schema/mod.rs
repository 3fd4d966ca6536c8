//! Logical schema model.
//!
//! A schema is the five-part structure of relations, attributes, primary
//! keys, foreign keys and domain constraints. [`Schema`] values are kept in
//! canonical order (every component sorted by identifier) so that equality
//! is insensitive to the order components were added in, and serialization is
//! byte-stable.

mod id;
mod io;
mod validate;

#[cfg(test)]
pub(crate) mod fixtures;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use id::{natural_cmp, AttrId, TableId};
pub use io::{deserialize_schema, serialize_schema, SchemaError};
pub use validate::{validate_schema, Rule, ValidationReport, Violation};

/// Coarse attribute type vocabulary. Finer distinctions (BIGINT, TINYINT,
/// VARCHAR(n), ...) are intentionally not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DataType {
    Numeric,
    Text,
    Datetime,
    Binary,
    Bool,
}

impl DataType {
    pub const ALL: [DataType; 5] =
        [DataType::Numeric, DataType::Text, DataType::Datetime, DataType::Binary, DataType::Bool];

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Numeric => "NUMERIC",
            DataType::Text => "TEXT",
            DataType::Datetime => "DATETIME",
            DataType::Binary => "BINARY",
            DataType::Bool => "BOOL",
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataType {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DataType::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| SchemaError::UnknownDataType(s.to_owned()))
    }
}

/// Domain constraint kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintKind {
    NotNull,
    Unique,
}

impl ConstraintKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintKind::NotNull => "NOT_NULL",
            ConstraintKind::Unique => "UNIQUE",
        }
    }
}

impl FromStr for ConstraintKind {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NOT_NULL" => Ok(ConstraintKind::NotNull),
            "UNIQUE" => Ok(ConstraintKind::Unique),
            other => Err(SchemaError::UnknownConstraintKind(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    #[serde(rename = "tID")]
    pub id: TableId,
    #[serde(rename = "tName")]
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    #[serde(rename = "aID")]
    pub id: AttrId,
    #[serde(rename = "aName")]
    pub name: String,
    #[serde(rename = "aType")]
    pub data_type: DataType,
    #[serde(rename = "tID")]
    pub table: TableId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryKey {
    #[serde(rename = "tID")]
    pub table: TableId,
    #[serde(rename = "keyAttrs")]
    pub attrs: BTreeSet<AttrId>,
}

/// `from` references the primary-key attribute `to`. Composite references
/// are expressed as several single-attribute entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ForeignKey {
    #[serde(rename = "fromAttr")]
    pub from: AttrId,
    #[serde(rename = "toAttr")]
    pub to: AttrId,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DomainConstraint {
    pub attr: AttrId,
    pub kind: ConstraintKind,
}

/// The raw five sets, in whatever order the caller built them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaParts {
    pub relations: Vec<Relation>,
    pub attributes: Vec<Attribute>,
    pub primary_keys: Vec<PrimaryKey>,
    pub foreign_keys: Vec<ForeignKey>,
    pub domain_constraints: Vec<DomainConstraint>,
}

impl SchemaParts {
    fn canonicalize(&mut self) {
        self.relations.sort_by(|a, b| a.id.cmp(&b.id));
        self.attributes.sort_by(|a, b| a.id.cmp(&b.id));
        self.primary_keys.sort_by(|a, b| a.table.cmp(&b.table));
        self.foreign_keys.sort();
        self.domain_constraints.sort();
    }
}

/// A logical schema in canonical order. Immutable once built; use
/// [`Schema::into_parts`] and [`Schema::from_parts`] to derive new schemas.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    parts: SchemaParts,
}

impl Schema {
    pub fn from_parts(mut parts: SchemaParts) -> Self {
        parts.canonicalize();
        Self { parts }
    }

    pub fn builder() -> SchemaBuilder {
        SchemaBuilder::default()
    }

    pub fn into_parts(self) -> SchemaParts {
        self.parts
    }

    pub fn parts(&self) -> &SchemaParts {
        &self.parts
    }

    pub fn relations(&self) -> &[Relation] {
        &self.parts.relations
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.parts.attributes
    }

    pub fn primary_keys(&self) -> &[PrimaryKey] {
        &self.parts.primary_keys
    }

    pub fn foreign_keys(&self) -> &[ForeignKey] {
        &self.parts.foreign_keys
    }

    pub fn domain_constraints(&self) -> &[DomainConstraint] {
        &self.parts.domain_constraints
    }

    pub fn is_empty(&self) -> bool {
        self.parts.relations.is_empty() && self.parts.attributes.is_empty()
    }

    pub fn relation(&self, id: &TableId) -> Option<&Relation> {
        self.parts.relations.iter().find(|r| &r.id == id)
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&Relation> {
        self.parts.relations.iter().find(|r| r.name == name)
    }

    pub fn attribute(&self, id: &AttrId) -> Option<&Attribute> {
        self.parts.attributes.iter().find(|a| &a.id == id)
    }

    /// `A(tID)`: the attributes owned by `table`, in identifier order.
    pub fn attributes_of<'a>(&'a self, table: &'a TableId) -> impl Iterator<Item = &'a Attribute> + 'a {
        self.parts.attributes.iter().filter(move |a| &a.table == table)
    }

    pub fn attribute_by_name(&self, table: &TableId, name: &str) -> Option<&Attribute> {
        self.parts.attributes.iter().find(|a| &a.table == table && a.name == name)
    }

    pub fn primary_key(&self, table: &TableId) -> Option<&PrimaryKey> {
        self.parts.primary_keys.iter().find(|p| &p.table == table)
    }

    /// Foreign keys whose referencing attribute lives in `table`.
    pub fn foreign_keys_from<'a>(&'a self, table: &'a TableId) -> impl Iterator<Item = &'a ForeignKey> + 'a {
        self.parts.foreign_keys.iter().filter(move |fk| self.attribute(&fk.from).is_some_and(|a| &a.table == table))
    }

    pub fn has_constraint(&self, attr: &AttrId, kind: ConstraintKind) -> bool {
        self.parts.domain_constraints.iter().any(|d| &d.attr == attr && d.kind == kind)
    }
}

/// Incremental constructor that allocates `t1, t2, ...` and `a1, a2, ...`
/// identifiers.
#[derive(Debug, Default)]
pub struct SchemaBuilder {
    parts: SchemaParts,
    next_table: usize,
    next_attr: usize,
}

impl SchemaBuilder {
    /// Continues numbering after the highest `tN`/`aN` already present.
    pub fn from_schema(schema: Schema) -> Self {
        let parts = schema.into_parts();
        let next_table = parts.relations.iter().filter_map(|r| numeric_suffix(r.id.as_str(), 't')).max().unwrap_or(0);
        let next_attr = parts.attributes.iter().filter_map(|a| numeric_suffix(a.id.as_str(), 'a')).max().unwrap_or(0);
        Self { parts, next_table, next_attr }
    }

    pub fn add_relation(&mut self, name: impl Into<String>) -> TableId {
        self.next_table += 1;
        let id = TableId::new(format!("t{}", self.next_table));
        self.parts.relations.push(Relation { id: id.clone(), name: name.into() });
        id
    }

    pub fn add_attribute(&mut self, table: &TableId, name: impl Into<String>, data_type: DataType) -> AttrId {
        self.next_attr += 1;
        let id = AttrId::new(format!("a{}", self.next_attr));
        self.parts.attributes.push(Attribute { id: id.clone(), name: name.into(), data_type, table: table.clone() });
        id
    }

    /// Sets (or replaces) the primary key of `table` and attaches NOT_NULL to
    /// every key attribute. UNIQUE is attached only to single-attribute keys;
    /// on a composite key it would wrongly constrain each column on its own.
    pub fn set_primary_key(&mut self, table: &TableId, attrs: impl IntoIterator<Item = AttrId>) {
        let attrs: BTreeSet<AttrId> = attrs.into_iter().collect();
        self.parts.primary_keys.retain(|p| &p.table != table);
        for a in &attrs {
            self.add_domain_constraint(a.clone(), ConstraintKind::NotNull);
        }
        if attrs.len() == 1 {
            let only = attrs.iter().next().cloned().expect("len checked");
            self.add_domain_constraint(only, ConstraintKind::Unique);
        }
        self.parts.primary_keys.push(PrimaryKey { table: table.clone(), attrs });
    }

    pub fn add_foreign_key(&mut self, from: AttrId, to: AttrId) {
        let fk = ForeignKey { from, to };
        if !self.parts.foreign_keys.contains(&fk) {
            self.parts.foreign_keys.push(fk);
        }
    }

    pub fn add_domain_constraint(&mut self, attr: AttrId, kind: ConstraintKind) {
        let dc = DomainConstraint { attr, kind };
        if !self.parts.domain_constraints.contains(&dc) {
            self.parts.domain_constraints.push(dc);
        }
    }

    /// Direct access for edits the builder has no method for, such as moving
    /// an attribute to another table.
    pub fn parts_mut(&mut self) -> &mut SchemaParts {
        &mut self.parts
    }

    pub fn relation_name(&self, table: &TableId) -> Option<&str> {
        self.parts.relations.iter().find(|r| &r.id == table).map(|r| r.name.as_str())
    }

    pub fn build(self) -> Schema {
        Schema::from_parts(self.parts)
    }
}

fn numeric_suffix(id: &str, prefix: char) -> Option<usize> {
    id.strip_prefix(prefix)?.parse().ok()
}
