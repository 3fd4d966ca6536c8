//! Canonical JSON form of a schema.
//!
//! Top-level keys are `relations`, `attributes`, `primary_keys`,
//! `foreign_keys` and `domain_constraints`; member field names are `tID`,
//! `tName`, `aID`, `aName`, `aType`, `keyAttrs`, `fromAttr`, `toAttr`,
//! `attr` and `kind`. Every list is emitted in identifier order.

use serde::Deserialize;
use thiserror::Error;

use super::{
    validate_schema, AttrId, Attribute, ConstraintKind, DataType, DomainConstraint, ForeignKey, PrimaryKey, Relation,
    Schema, SchemaParts, TableId, ValidationReport,
};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed schema document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unknown data type `{0}` (expected NUMERIC, TEXT, DATETIME, BINARY or BOOL)")]
    UnknownDataType(String),
    #[error("unknown domain constraint `{0}` (expected NOT_NULL or UNIQUE)")]
    UnknownConstraintKind(String),
    #[error("dangling reference in {component}: {detail}")]
    DanglingReference { component: String, detail: String },
    #[error("schema is invalid:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    relations: Vec<Relation>,
    attributes: Vec<RawAttribute>,
    primary_keys: Vec<PrimaryKey>,
    foreign_keys: Vec<ForeignKey>,
    domain_constraints: Vec<RawConstraint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttribute {
    #[serde(rename = "aID")]
    id: AttrId,
    #[serde(rename = "aName")]
    name: String,
    #[serde(rename = "aType")]
    data_type: String,
    #[serde(rename = "tID")]
    table: TableId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    attr: AttrId,
    kind: String,
}

/// Renders a valid schema as pretty-printed canonical JSON with a trailing
/// newline.
pub fn serialize_schema(s: &Schema) -> Result<String, SchemaError> {
    let report = validate_schema(s);
    if !report.is_ok() {
        return Err(SchemaError::Invalid(report));
    }
    let mut text = serde_json::to_string_pretty(s.parts())?;
    text.push('\n');
    Ok(text)
}

/// Parses the canonical form. Rejects malformed documents, unknown type or
/// constraint names and identifiers that reference nothing. Other
/// invariants are left to [`validate_schema`].
pub fn deserialize_schema(text: &str) -> Result<Schema, SchemaError> {
    let raw: RawDoc = serde_json::from_str(text)?;
    let attributes = raw
        .attributes
        .into_iter()
        .map(|a| Ok(Attribute { id: a.id, name: a.name, data_type: a.data_type.parse::<DataType>()?, table: a.table }))
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let domain_constraints = raw
        .domain_constraints
        .into_iter()
        .map(|c| Ok(DomainConstraint { attr: c.attr, kind: c.kind.parse::<ConstraintKind>()? }))
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let schema = Schema::from_parts(SchemaParts {
        relations: raw.relations,
        attributes,
        primary_keys: raw.primary_keys,
        foreign_keys: raw.foreign_keys,
        domain_constraints,
    });
    if let Some(v) = validate_schema(&schema).violations.into_iter().find(|v| v.rule.is_dangling()) {
        return Err(SchemaError::DanglingReference { component: v.component, detail: v.message });
    }
    Ok(schema)
}

impl serde::Serialize for Schema {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.parts().serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Schema {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        SchemaParts::deserialize(deserializer).map(Schema::from_parts)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::users_orders;
    use super::*;

    #[test]
    fn round_trip_users_orders() {
        let s = users_orders();
        let text = serialize_schema(&s).unwrap();
        assert_eq!(deserialize_schema(&text).unwrap(), s);
        assert_eq!(serialize_schema(&s).unwrap(), text);
    }

    #[test]
    fn field_names_are_canonical() {
        let text = serialize_schema(&users_orders()).unwrap();
        for key in [
            "\"relations\"",
            "\"attributes\"",
            "\"primary_keys\"",
            "\"foreign_keys\"",
            "\"domain_constraints\"",
            "\"tID\"",
            "\"tName\"",
            "\"aID\"",
            "\"aName\"",
            "\"aType\"",
            "\"keyAttrs\"",
            "\"fromAttr\"",
            "\"toAttr\"",
            "\"attr\"",
            "\"kind\"",
            "\"NOT_NULL\"",
        ] {
            assert!(text.contains(key), "missing {key}");
        }
    }

    #[test]
    fn bigint_is_rejected() {
        let text = serialize_schema(&users_orders()).unwrap().replacen("\"TEXT\"", "\"BIGINT\"", 1);
        let err = deserialize_schema(&text).unwrap_err();
        assert!(matches!(err, SchemaError::UnknownDataType(ref t) if t == "BIGINT"));
        assert!(err.to_string().contains("unknown data type"));
    }

    #[test]
    fn fk_to_missing_attribute_is_dangling() {
        let text = serialize_schema(&users_orders()).unwrap().replace("\"toAttr\": \"a1\"", "\"toAttr\": \"a99\"");
        let err = deserialize_schema(&text).unwrap_err();
        assert!(matches!(err, SchemaError::DanglingReference { .. }), "{err}");
        assert!(err.to_string().contains("dangling reference"));
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(matches!(deserialize_schema("{not json"), Err(SchemaError::Malformed(_))));
        assert!(matches!(deserialize_schema("{\"relations\": []}"), Err(SchemaError::Malformed(_))));
    }

    #[test]
    fn serialize_requires_valid_schema() {
        let mut b = Schema::builder();
        b.add_relation("empty");
        assert!(matches!(serialize_schema(&b.build()), Err(SchemaError::Invalid(_))));
    }

    #[test]
    fn empty_schema_round_trips() {
        let text = serialize_schema(&Schema::default()).unwrap();
        assert_eq!(deserialize_schema(&text).unwrap(), Schema::default());
    }
}
