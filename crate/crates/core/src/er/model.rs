//! ER model types and their JSON form.
//!
//! ```json
//! {
//!   "Entity Set": {
//!     "Student": {
//!       "Attributes": {"student_no": "NUMERIC", "name": "TEXT"},
//!       "Primary Key": ["student_no"],
//!       "Functional Dependencies": [{"lhs": ["student_no"], "rhs": ["name"]}]
//!     }
//!   },
//!   "Relationship Set": {
//!     "Enrolls": {
//!       "Participants": [
//!         {"Entity Set": "Student", "Cardinality": "MANY"},
//!         {"Entity Set": "Course", "Cardinality": "MANY"}
//!       ],
//!       "Relationship Attribute": {"grade": "NUMERIC"}
//!     }
//!   }
//! }
//! ```
//!
//! Parsing is lenient about what a language model tends to produce: an
//! optional `"output"` wrapper, sets given as lists of objects carrying a
//! `"Name"`, attributes as `{"Name", "Type"}` lists, participants as a
//! name-to-mark object, FDs as `"a, b -> c"` strings, and common SQL type
//! names that are folded onto the five coarse types. Emission always uses the
//! canonical shape above.

use serde_json::{json, Map, Value};

use super::ErError;
use crate::schema::DataType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cardinality {
    One,
    Many,
}

impl Cardinality {
    pub fn as_str(self) -> &'static str {
        match self {
            Cardinality::One => "ONE",
            Cardinality::Many => "MANY",
        }
    }

    pub fn parse(mark: &str) -> Option<Self> {
        match mark.trim().to_ascii_uppercase().as_str() {
            "ONE" | "1" => Some(Cardinality::One),
            "MANY" | "N" | "M" => Some(Cardinality::Many),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingCardinality {
    OneToOne,
    OneToMany,
    ManyToOne,
    ManyToMany,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErAttribute {
    pub name: String,
    pub data_type: DataType,
}

impl ErAttribute {
    pub fn new(name: impl Into<String>, data_type: DataType) -> Self {
        Self { name: name.into(), data_type }
    }
}

/// An FD stated over the attribute names of one entity or relationship set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErFd {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

impl ErFd {
    pub fn new<S: Into<String>>(lhs: impl IntoIterator<Item = S>, rhs: impl IntoIterator<Item = S>) -> Self {
        Self { lhs: lhs.into_iter().map(Into::into).collect(), rhs: rhs.into_iter().map(Into::into).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySet {
    pub name: String,
    pub attributes: Vec<ErAttribute>,
    pub key_hint: Option<Vec<String>>,
    pub fds: Vec<ErFd>,
}

impl EntitySet {
    pub fn new(name: impl Into<String>, attributes: Vec<ErAttribute>) -> Self {
        Self { name: name.into(), attributes, key_hint: None, fds: Vec::new() }
    }

    pub fn with_key<S: Into<String>>(mut self, key: impl IntoIterator<Item = S>) -> Self {
        self.key_hint = Some(key.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_fd(mut self, fd: ErFd) -> Self {
        self.fds.push(fd);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&ErAttribute> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

/// A participant keeps its raw cardinality mark so the reviewer can report
/// missing or unknown marks instead of failing to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Participant {
    pub entity: String,
    pub mark: Option<String>,
}

impl Participant {
    pub fn new(entity: impl Into<String>, cardinality: Cardinality) -> Self {
        Self { entity: entity.into(), mark: Some(cardinality.as_str().to_string()) }
    }

    pub fn cardinality(&self) -> Option<Cardinality> {
        self.mark.as_deref().and_then(Cardinality::parse)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationshipSet {
    pub name: String,
    pub participants: Vec<Participant>,
    pub attributes: Vec<ErAttribute>,
    pub fds: Vec<ErFd>,
}

impl RelationshipSet {
    pub fn new(name: impl Into<String>, participants: Vec<Participant>) -> Self {
        Self { name: name.into(), participants, attributes: Vec::new(), fds: Vec::new() }
    }

    pub fn with_attribute(mut self, attr: ErAttribute) -> Self {
        self.attributes.push(attr);
        self
    }

    pub fn with_fd(mut self, fd: ErFd) -> Self {
        self.fds.push(fd);
        self
    }

    /// Mapping cardinality of a binary relationship, read first participant
    /// to second. `None` for other arities or unusable marks.
    pub fn mapping(&self) -> Option<MappingCardinality> {
        let [a, b] = self.participants.as_slice() else {
            return None;
        };
        use Cardinality::*;
        Some(match (a.cardinality()?, b.cardinality()?) {
            (One, One) => MappingCardinality::OneToOne,
            (One, Many) => MappingCardinality::OneToMany,
            (Many, One) => MappingCardinality::ManyToOne,
            (Many, Many) => MappingCardinality::ManyToMany,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptualModel {
    pub entity_sets: Vec<EntitySet>,
    pub relationship_sets: Vec<RelationshipSet>,
}

impl ConceptualModel {
    pub fn entity(&self, name: &str) -> Option<&EntitySet> {
        self.entity_sets.iter().find(|e| e.name == name)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ErError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ErError::Parse(e.to_string()))?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self, ErError> {
        let root = match value.get("output") {
            Some(inner) if inner.is_object() => inner,
            _ => value,
        };
        let root = root.as_object().ok_or_else(|| parse_err("conceptual model must be an object"))?;
        let entities = field(root, &["Entity Set", "Entity Sets", "entity_sets", "entities"]);
        let relationships =
            field(root, &["Relationship Set", "Relationship Sets", "relationship_sets", "relationships"]);
        if entities.is_none() && relationships.is_none() {
            return Err(parse_err("missing \"Entity Set\""));
        }
        let entity_sets = match entities {
            Some(v) => named_items(v, "Entity Set")?
                .into_iter()
                .map(|(name, body)| parse_entity(name, body))
                .collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        let relationship_sets = match relationships {
            Some(v) => named_items(v, "Relationship Set")?
                .into_iter()
                .map(|(name, body)| parse_relationship(name, body))
                .collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        Ok(Self { entity_sets, relationship_sets })
    }

    pub fn to_json(&self) -> Value {
        let mut entities = Map::new();
        for e in &self.entity_sets {
            let mut body = Map::new();
            body.insert("Attributes".into(), attrs_json(&e.attributes));
            if let Some(key) = &e.key_hint {
                body.insert("Primary Key".into(), json!(key));
            }
            if !e.fds.is_empty() {
                body.insert("Functional Dependencies".into(), fds_json(&e.fds));
            }
            entities.insert(e.name.clone(), Value::Object(body));
        }
        let mut relationships = Map::new();
        for r in &self.relationship_sets {
            let participants: Vec<Value> = r
                .participants
                .iter()
                .map(|p| {
                    let mut o = Map::new();
                    o.insert("Entity Set".into(), json!(p.entity));
                    if let Some(mark) = &p.mark {
                        o.insert("Cardinality".into(), json!(mark));
                    }
                    Value::Object(o)
                })
                .collect();
            let mut body = Map::new();
            body.insert("Participants".into(), Value::Array(participants));
            body.insert("Relationship Attribute".into(), attrs_json(&r.attributes));
            if !r.fds.is_empty() {
                body.insert("Functional Dependencies".into(), fds_json(&r.fds));
            }
            relationships.insert(r.name.clone(), Value::Object(body));
        }
        json!({"Entity Set": entities, "Relationship Set": relationships})
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("model JSON is always serializable")
    }
}

fn parse_err(msg: impl Into<String>) -> ErError {
    ErError::Parse(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| obj.get(*n))
}

fn string_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Accepts `{name: body}` or `[{"Name": name, ...body}]`.
fn named_items<'a>(v: &'a Value, what: &str) -> Result<Vec<(String, &'a Value)>, ErError> {
    match v {
        Value::Object(map) => Ok(map.iter().map(|(k, v)| (k.clone(), v)).collect()),
        Value::Array(items) => items
            .iter()
            .map(|item| {
                let name = item
                    .as_object()
                    .and_then(|o| field(o, &["Name", "name"]))
                    .and_then(string_of)
                    .ok_or_else(|| parse_err(format!("{what} entry without a name")))?;
                Ok((name, item))
            })
            .collect(),
        Value::Null => Ok(Vec::new()),
        _ => Err(parse_err(format!("\"{what}\" must be an object or a list"))),
    }
}

pub(crate) fn coarse_type(raw: &str) -> Option<DataType> {
    let upper = raw.trim().to_ascii_uppercase();
    let base = upper.split(|c: char| c == '(' || c.is_whitespace()).next().unwrap_or("");
    if let Ok(t) = base.parse::<DataType>() {
        return Some(t);
    }
    Some(match base {
        "INT" | "INTEGER" | "BIGINT" | "SMALLINT" | "TINYINT" | "DECIMAL" | "FLOAT" | "DOUBLE" | "REAL" | "NUMBER"
        | "SERIAL" | "MONEY" => DataType::Numeric,
        "VARCHAR" | "CHAR" | "STRING" | "NVARCHAR" | "CLOB" | "ENUM" => DataType::Text,
        "DATE" | "TIME" | "TIMESTAMP" => DataType::Datetime,
        "BLOB" | "BYTES" | "VARBINARY" => DataType::Binary,
        "BOOLEAN" => DataType::Bool,
        _ => return None,
    })
}

fn parse_type(owner: &str, attr: &str, v: &Value) -> Result<DataType, ErError> {
    let raw = v.as_str().ok_or_else(|| parse_err(format!("{owner}.{attr}: type must be a string")))?;
    coarse_type(raw).ok_or_else(|| parse_err(format!("{owner}.{attr}: unknown data type `{raw}`")))
}

fn parse_attrs(owner: &str, v: Option<&Value>) -> Result<Vec<ErAttribute>, ErError> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Object(map)) => {
            map.iter().map(|(name, t)| Ok(ErAttribute::new(name.clone(), parse_type(owner, name, t)?))).collect()
        }
        Some(Value::Array(items)) => items
            .iter()
            .map(|item| {
                let o = item.as_object().ok_or_else(|| parse_err(format!("{owner}: attribute must be an object")))?;
                let name = field(o, &["Name", "name"])
                    .and_then(string_of)
                    .ok_or_else(|| parse_err(format!("{owner}: attribute without a name")))?;
                let t = field(o, &["Type", "type", "aType"])
                    .ok_or_else(|| parse_err(format!("{owner}.{name}: missing type")))?;
                Ok(ErAttribute::new(name.clone(), parse_type(owner, &name, t)?))
            })
            .collect(),
        Some(_) => Err(parse_err(format!("{owner}: attributes must be an object or a list"))),
    }
}

fn name_list(v: &Value) -> Option<Vec<String>> {
    match v {
        Value::String(s) => Some(s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()),
        Value::Array(items) => items.iter().map(string_of).collect(),
        _ => None,
    }
}

pub(crate) fn parse_fds(owner: &str, v: Option<&Value>) -> Result<Vec<ErFd>, ErError> {
    let items = match v {
        None | Some(Value::Null) => return Ok(Vec::new()),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(parse_err(format!("{owner}: functional dependencies must be a list"))),
    };
    items
        .iter()
        .map(|item| {
            let bad = || parse_err(format!("{owner}: malformed functional dependency {item}"));
            let (lhs, rhs) = match item {
                Value::String(s) => {
                    let (l, r) = s.split_once("->").ok_or_else(bad)?;
                    (name_list(&json!(l)).ok_or_else(bad)?, name_list(&json!(r)).ok_or_else(bad)?)
                }
                Value::Object(o) => {
                    let l = field(o, &["lhs", "LHS", "Determinant"]).and_then(name_list).ok_or_else(bad)?;
                    let r = field(o, &["rhs", "RHS", "Dependent"]).and_then(name_list).ok_or_else(bad)?;
                    (l, r)
                }
                _ => return Err(bad()),
            };
            Ok(ErFd { lhs, rhs })
        })
        .collect()
}

fn parse_entity(name: String, body: &Value) -> Result<EntitySet, ErError> {
    let empty = Map::new();
    let o = match body {
        Value::Object(o) => o,
        Value::Null => &empty,
        _ => return Err(parse_err(format!("entity set `{name}` must be an object"))),
    };
    let attributes = parse_attrs(&name, field(o, &["Attributes", "attributes"]))?;
    let key_hint = match field(o, &["Primary Key", "primary_key", "Key"]) {
        None | Some(Value::Null) => None,
        Some(v) => Some(name_list(v).ok_or_else(|| parse_err(format!("{name}: malformed primary key")))?),
    };
    let fds = parse_fds(&name, field(o, &["Functional Dependencies", "functional_dependencies", "FDs"]))?;
    Ok(EntitySet { name, attributes, key_hint, fds })
}

fn parse_participants(owner: &str, v: Option<&Value>) -> Result<Vec<Participant>, ErError> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Object(map)) => {
            Ok(map.iter().map(|(entity, mark)| Participant { entity: entity.clone(), mark: string_of(mark) }).collect())
        }
        Some(Value::Array(items)) => items
            .iter()
            .map(|item| match item {
                Value::String(s) => Ok(Participant { entity: s.clone(), mark: None }),
                Value::Object(o) => {
                    let entity = field(o, &["Entity Set", "Entity", "entity", "Name"])
                        .and_then(string_of)
                        .ok_or_else(|| parse_err(format!("{owner}: participant without an entity set")))?;
                    let mark = field(o, &["Cardinality", "cardinality"]).and_then(string_of);
                    Ok(Participant { entity, mark })
                }
                _ => Err(parse_err(format!("{owner}: malformed participant"))),
            })
            .collect(),
        Some(_) => Err(parse_err(format!("{owner}: participants must be an object or a list"))),
    }
}

fn parse_relationship(name: String, body: &Value) -> Result<RelationshipSet, ErError> {
    let o = body.as_object().ok_or_else(|| parse_err(format!("relationship set `{name}` must be an object")))?;
    let participants = parse_participants(&name, field(o, &["Participants", "participants", "Entity Sets"]))?;
    let attributes = parse_attrs(
        &name,
        field(o, &["Relationship Attribute", "Relationship Attributes", "Attributes", "attributes"]),
    )?;
    let fds = parse_fds(&name, field(o, &["Functional Dependencies", "functional_dependencies", "FDs"]))?;
    Ok(RelationshipSet { name, participants, attributes, fds })
}

fn attrs_json(attrs: &[ErAttribute]) -> Value {
    let mut m = Map::new();
    for a in attrs {
        m.insert(a.name.clone(), json!(a.data_type.as_str()));
    }
    Value::Object(m)
}

fn fds_json(fds: &[ErFd]) -> Value {
    Value::Array(fds.iter().map(|fd| json!({"lhs": fd.lhs, "rhs": fd.rhs})).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::er::fixtures::school;

    #[test]
    fn canonical_json_round_trips() {
        let m = school();
        let back = ConceptualModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn lenient_shapes_parse() {
        let text = r#"{"output": {
            "Entity Set": [
                {"Name": "Student", "Attributes": [{"Name": "sno", "Type": "integer"}, {"Name": "born", "Type": "DATE"}],
                 "Primary Key": "sno",
                 "Functional Dependencies": ["sno -> born"]}
            ],
            "Relationship Set": {
                "Mentors": {"Participants": {"Student": "ONE", "Teacher": "many"}, "Relationship Attribute": null}
            }
        }}"#;
        let m = ConceptualModel::from_json_str(text).unwrap();
        let s = &m.entity_sets[0];
        assert_eq!(
            s.attributes,
            vec![ErAttribute::new("sno", DataType::Numeric), ErAttribute::new("born", DataType::Datetime)]
        );
        assert_eq!(s.key_hint, Some(vec!["sno".to_string()]));
        assert_eq!(s.fds, vec![ErFd::new(["sno"], ["born"])]);
        let r = &m.relationship_sets[0];
        assert_eq!(r.participants[1].cardinality(), Some(Cardinality::Many));
        assert_eq!(r.mapping(), Some(MappingCardinality::OneToMany));
    }

    #[test]
    fn unknown_type_and_shape_errors() {
        let e = ConceptualModel::from_json_str(r#"{"Entity Set": {"A": {"Attributes": {"x": "GEOMETRY"}}}}"#);
        assert!(matches!(e, Err(ErError::Parse(m)) if m.contains("unknown data type")));
        assert!(ConceptualModel::from_json_str("[1, 2]").is_err());
        assert!(ConceptualModel::from_json_str(r#"{"foo": 1}"#).is_err());
    }

    #[test]
    fn mapping_cardinality_views() {
        let r = RelationshipSet::new(
            "r",
            vec![Participant::new("A", Cardinality::Many), Participant::new("B", Cardinality::One)],
        );
        assert_eq!(r.mapping(), Some(MappingCardinality::ManyToOne));
        let mut bad = r.clone();
        bad.participants[0].mark = Some("SEVERAL".into());
        assert_eq!(bad.mapping(), None);
    }
}
