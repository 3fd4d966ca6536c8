//! Conceptual (ER) layer: model types, deterministic review, mapping to a
//! logical schema and FD-driven normalization of that schema.

#[cfg(test)]
pub(crate) mod fixtures;
mod mapping;
mod model;
mod normalize;
mod review;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fd::{Fd, FdError, FdSet};
use crate::schema::{Schema, TableId};

pub use mapping::{entity_keys, map_to_logical, relationship_keys, SetKey};
pub(crate) use model::parse_fds;
pub use model::{
    Cardinality, ConceptualModel, EntitySet, ErAttribute, ErFd, MappingCardinality, Participant, RelationshipSet,
};
pub use normalize::normalize_logical;
pub use review::{is_identifier_like, review_conceptual_model, Finding, ReviewRule, Severity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErError {
    #[error("malformed conceptual model: {0}")]
    Parse(String),
    #[error("relationship `{relationship}` references unknown entity set `{entity}`")]
    UnresolvableParticipant { relationship: String, entity: String },
    #[error("relationship `{0}` has a missing or invalid cardinality mark")]
    MissingCardinality(String),
    #[error("relationship `{0}` needs at least two participants")]
    TooFewParticipants(String),
    #[error("`{0}` has no attributes, so no key can be identified")]
    Keyless(String),
    #[error("`{set}`: contradictory key: {reason}")]
    ContradictoryKey { set: String, reason: String },
    #[error("`{set}` mentions unknown attribute `{attr}`")]
    UnknownAttribute { set: String, attr: String },
    #[error("schema is not valid:\n{0}")]
    InvalidSchema(String),
    #[error("invalid conceptual design: table `{table}`: {reason}")]
    InvalidConceptualDesign { table: String, reason: String },
    #[error(transparent)]
    Fd(#[from] FdError),
}

impl ErError {
    /// Whether the error points at the conceptual model (and so should be
    /// sent back to its designer) rather than at malformed input.
    pub fn is_design_error(&self) -> bool {
        !matches!(self, ErError::Parse(_))
    }
}

/// FDs per table, stated over column names.
pub type TableFds = BTreeMap<TableId, Vec<Fd>>;

/// A logical schema together with the FDs known to hold on each table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalDesign {
    pub schema: Schema,
    pub fds: TableFds,
}

impl LogicalDesign {
    /// The FD set of one table: the recorded FDs plus `PK -> every other
    /// column` when a primary key is declared.
    pub fn table_fds(&self, table: &TableId) -> Result<FdSet, ErError> {
        table_fd_set(&self.schema, table, self.fds.get(table).map(Vec::as_slice).unwrap_or(&[]))
    }
}

pub(crate) fn table_fd_set(schema: &Schema, table: &TableId, recorded: &[Fd]) -> Result<FdSet, ErError> {
    let tname = || schema.relation(table).map(|r| r.name.clone()).unwrap_or_else(|| table.to_string());
    let universe: crate::fd::AttrSet = schema.attributes_of(table).map(|a| a.name.clone()).collect();
    let mut fds = recorded.to_vec();
    if let Some(pk) = schema.primary_key(table) {
        let lhs: crate::fd::AttrSet =
            pk.attrs.iter().filter_map(|id| schema.attribute(id).map(|a| a.name.clone())).collect();
        let rhs: crate::fd::AttrSet = universe.difference(&lhs).cloned().collect();
        if !rhs.is_empty() {
            let fd = Fd { lhs, rhs };
            let base = FdSet::new(universe.clone(), recorded.iter().cloned()).map_err(|e| fd_err(tname(), e))?;
            if !crate::fd::implies(&base, &fd).map_err(|e| fd_err(tname(), e))? {
                fds.push(fd);
            }
        }
    }
    FdSet::new(universe, fds).map_err(|e| fd_err(tname(), e))
}

fn fd_err(table: String, e: FdError) -> ErError {
    match e {
        FdError::UnknownAttribute(attr) => ErError::UnknownAttribute { set: table, attr },
        other => ErError::Fd(other),
    }
}

/// Table and column identifier for a conceptual name: lower case, runs of
/// spaces, hyphens and underscores collapsed to one underscore, other
/// punctuation dropped. Non-ASCII letters are spelled as `uXXXX` so distinct
/// names stay distinct.
pub fn mangle(name: &str) -> String {
    let mut out = String::new();
    let mut pending_sep = false;
    for c in name.trim().chars() {
        if c.is_ascii_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.push(c.to_ascii_lowercase());
        } else if c.is_whitespace() || c == '_' || c == '-' {
            pending_sep = true;
        } else if !c.is_ascii() {
            if !out.is_empty() {
                out.push('_');
            }
            out.push_str(&format!("u{:04x}", c as u32));
            pending_sep = true;
        }
    }
    if out.is_empty() {
        "unnamed".to_string()
    } else {
        out
    }
}
