//! Random valid schemas for property tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use schemaforge::{ConstraintKind, DataType, Schema, SchemaBuilder};

const TABLE_NAMES: [&str; 8] = ["users", "order", "select", "my table", "Quote\"d", "group", "item", "Kunde"];
const COLUMN_NAMES: [&str; 8] = ["id", "name", "created at", "from", "price", "Flag", "x\"y", "user_id"];

#[derive(Debug, Clone)]
struct TablePlan {
    name: usize,
    columns: Vec<(usize, usize)>,
    pk_mask: u32,
}

#[derive(Debug, Clone)]
struct Plan {
    tables: Vec<TablePlan>,
    fks: Vec<(usize, usize, usize)>,
    constraints: Vec<(usize, usize, bool)>,
}

fn table_plan() -> impl Strategy<Value = TablePlan> {
    (0..TABLE_NAMES.len(), prop::collection::vec((0..COLUMN_NAMES.len(), 0..5usize), 1..5), any::<u32>())
        .prop_map(|(name, columns, pk_mask)| TablePlan { name, columns, pk_mask })
}

fn plan() -> impl Strategy<Value = Plan> {
    (
        prop::collection::vec(table_plan(), 1..5),
        prop::collection::vec((any::<usize>(), any::<usize>(), any::<usize>()), 0..5),
        prop::collection::vec((any::<usize>(), any::<usize>(), any::<bool>()), 0..4),
    )
        .prop_map(|(tables, fks, constraints)| Plan { tables, fks, constraints })
}

fn unique(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut n = 2;
    while !taken.insert(name.clone()) {
        name = format!("{base}_{n}");
        n += 1;
    }
    name
}

fn build(p: Plan) -> Schema {
    let mut b = SchemaBuilder::default();
    let mut table_names = BTreeSet::new();
    let mut tables = Vec::new();
    for t in &p.tables {
        let tid = b.add_relation(unique(TABLE_NAMES[t.name], &mut table_names));
        let mut cols = BTreeSet::new();
        let mut attrs = Vec::new();
        for &(c, ty) in &t.columns {
            let name = unique(COLUMN_NAMES[c], &mut cols);
            attrs.push((b.add_attribute(&tid, name, DataType::ALL[ty]), DataType::ALL[ty]));
        }
        // Low bit zero means no primary key.
        let pk: Vec<_> =
            attrs.iter().enumerate().filter(|(i, _)| t.pk_mask >> (i + 1) & 1 == 1).map(|(_, a)| a.0.clone()).collect();
        if t.pk_mask & 1 == 1 && !pk.is_empty() {
            b.set_primary_key(&tid, pk.clone());
        }
        tables.push((tid, cols, attrs, if t.pk_mask & 1 == 1 { pk } else { Vec::new() }));
    }
    for (k, &(from, to, pick)) in p.fks.iter().enumerate() {
        let to = to % tables.len();
        if tables[to].3.is_empty() {
            continue;
        }
        let target = tables[to].3[pick % tables[to].3.len()].clone();
        let ty = tables[to].2.iter().find(|(id, _)| *id == target).map(|(_, t)| *t).unwrap();
        let from = from % tables.len();
        let tid = tables[from].0.clone();
        let name = unique(&format!("ref{k}"), &mut tables[from].1);
        let a = b.add_attribute(&tid, name, ty);
        tables[from].2.push((a.clone(), ty));
        b.add_foreign_key(a, target);
    }
    for &(t, c, unique_kind) in &p.constraints {
        let attrs = &tables[t % tables.len()].2;
        let kind = if unique_kind { ConstraintKind::Unique } else { ConstraintKind::NotNull };
        b.add_domain_constraint(attrs[c % attrs.len()].0.clone(), kind);
    }
    b.build()
}

/// Valid schemas with awkward identifiers, optional and composite keys,
/// self references and repeated references.
pub fn schema() -> impl Strategy<Value = Schema> {
    plan().prop_map(build)
}
