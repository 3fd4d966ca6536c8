use std::collections::{BTreeMap, BTreeSet};

use super::dialect::{Dialect, Sqlite};
use super::DdlError;
use crate::schema::{validate_schema, AttrId, ConstraintKind, ForeignKey, Schema, TableId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub table: String,
    pub sql: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdlScript {
    pub dialect: &'static str,
    pub statements: Vec<Statement>,
    /// Set when FK cycles forced declaration order for some tables.
    pub cyclic: bool,
}

impl DdlScript {
    /// Statements separated by blank lines, each ending in `;`.
    pub fn to_sql(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.statements.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&s.sql);
            out.push('\n');
        }
        out
    }
}

pub fn emit_ddl(s: &Schema) -> Result<DdlScript, DdlError> {
    emit_ddl_with(s, &Sqlite)
}

pub fn emit_ddl_with(s: &Schema, dialect: &dyn Dialect) -> Result<DdlScript, DdlError> {
    let report = validate_schema(s);
    if !report.is_ok() {
        return Err(DdlError::InvalidSchema(report.to_string()));
    }
    let table_of = |a: &AttrId| s.attribute(a).map(|x| x.table.clone()).expect("validated");
    let (order, cyclic) = topo_order(s, &table_of);
    if cyclic {
        tracing::warn!("foreign keys form a cycle; falling back to declaration order for the rest");
    }
    let statements = order
        .iter()
        .map(|t| Statement {
            table: s.relation(t).expect("known table").name.clone(),
            sql: create_table(s, t, dialect, &table_of),
        })
        .collect();
    Ok(DdlScript { dialect: dialect.name(), statements, cyclic })
}

/// Kahn's algorithm, always picking the earliest-declared ready table.
/// Tables left on a cycle follow in declaration order.
fn topo_order(s: &Schema, table_of: &dyn Fn(&AttrId) -> TableId) -> (Vec<TableId>, bool) {
    let tables: Vec<TableId> = s.relations().iter().map(|r| r.id.clone()).collect();
    let mut deps: BTreeMap<&TableId, BTreeSet<TableId>> = tables.iter().map(|t| (t, BTreeSet::new())).collect();
    for fk in s.foreign_keys() {
        let (from, to) = (table_of(&fk.from), table_of(&fk.to));
        if from != to {
            deps.get_mut(&from).expect("known table").insert(to);
        }
    }
    let mut done: BTreeSet<TableId> = BTreeSet::new();
    let mut order = Vec::new();
    while order.len() < tables.len() {
        let ready = tables.iter().find(|t| !done.contains(*t) && deps[t].iter().all(|d| done.contains(d)));
        match ready {
            Some(t) => {
                done.insert(t.clone());
                order.push(t.clone());
            }
            None => {
                let rest: Vec<TableId> = tables.iter().filter(|t| !done.contains(*t)).cloned().collect();
                order.extend(rest);
                return (order, true);
            }
        }
    }
    (order, false)
}

fn create_table(s: &Schema, t: &TableId, d: &dyn Dialect, table_of: &dyn Fn(&AttrId) -> TableId) -> String {
    let name_of = |a: &AttrId| d.quote(&s.attribute(a).expect("validated").name);
    let mut lines = Vec::new();
    for a in s.attributes_of(t) {
        let mut line = format!("{} {}", d.quote(&a.name), d.type_name(a.data_type));
        for kind in [ConstraintKind::NotNull, ConstraintKind::Unique] {
            if s.domain_constraints().iter().any(|c| c.attr == a.id && c.kind == kind) {
                line.push_str(match kind {
                    ConstraintKind::NotNull => " NOT NULL",
                    ConstraintKind::Unique => " UNIQUE",
                });
            }
        }
        lines.push(line);
    }
    if let Some(pk) = s.primary_key(t) {
        let cols: Vec<String> = pk.attrs.iter().map(name_of).collect();
        lines.push(format!("PRIMARY KEY ({})", cols.join(", ")));
    }
    for (target, group) in fk_groups(s, t, table_of) {
        let from: Vec<String> = group.iter().map(|fk| name_of(&fk.from)).collect();
        let to: Vec<String> = group.iter().map(|fk| name_of(&fk.to)).collect();
        let target = &s.relation(&target).expect("validated").name;
        lines.push(format!("FOREIGN KEY ({}) REFERENCES {} ({})", from.join(", "), d.quote(target), to.join(", ")));
    }
    let body: Vec<String> = lines.iter().map(|l| format!("    {l}")).collect();
    format!("CREATE TABLE {} (\n{}\n);", d.quote(&s.relation(t).expect("known table").name), body.join(",\n"))
}

/// FKs leaving `t`, grouped per referenced table. Entries that reference a
/// composite key are packed so each group names every referenced column at
/// most once; that keeps two separate references to the same table (say
/// `person_id` and `friend_person_id`) in separate clauses.
fn fk_groups(s: &Schema, t: &TableId, table_of: &dyn Fn(&AttrId) -> TableId) -> Vec<(TableId, Vec<ForeignKey>)> {
    let mut out: Vec<(TableId, Vec<ForeignKey>)> = Vec::new();
    let mut by_target: BTreeMap<TableId, Vec<&ForeignKey>> = BTreeMap::new();
    for fk in s.foreign_keys().iter().filter(|fk| &table_of(&fk.from) == t) {
        by_target.entry(table_of(&fk.to)).or_default().push(fk);
    }
    for (target, fks) in by_target {
        let composite = s.primary_key(&target).is_some_and(|pk| pk.attrs.len() > 1);
        let mut groups: Vec<Vec<ForeignKey>> = Vec::new();
        for fk in fks {
            let slot = if composite { groups.iter_mut().find(|g| g.iter().all(|x| x.to != fk.to)) } else { None };
            match slot {
                Some(g) => g.push(fk.clone()),
                None => groups.push(vec![fk.clone()]),
            }
        }
        out.extend(groups.into_iter().map(|g| (target.clone(), g)));
    }
    out
}
