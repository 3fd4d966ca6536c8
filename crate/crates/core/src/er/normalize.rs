use std::collections::{BTreeMap, BTreeSet};

use super::{table_fd_set, ErError, LogicalDesign, TableFds};
use crate::fd::{candidate_keys, is_3nf, minimal_cover, synthesize_3nf_with_key, AttrSet};
use crate::schema::{validate_schema, AttrId, Schema, SchemaBuilder, TableId};

const KEY_SUFFIXES: [&str; 6] = ["_id", "_no", "_code", "_number", "_num", "_key"];

/// Name for a split-off fragment: its single key column without an
/// identifier suffix (`cargo_no` gives `cargo`), else `<table>_<key cols>`.
fn fragment_name(key: &AttrSet, table: &str, taken: &BTreeSet<String>) -> String {
    let base = match key.iter().collect::<Vec<_>>().as_slice() {
        [only] => KEY_SUFFIXES
            .iter()
            .find_map(|s| only.strip_suffix(s).filter(|rest| !rest.is_empty()))
            .unwrap_or(only)
            .to_string(),
        cols => format!("{table}_{}", cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("_")),
    };
    if !taken.contains(&base) {
        return base;
    }
    (2..).map(|n| format!("{base}_{n}")).find(|n| !taken.contains(n)).expect("unbounded range")
}

fn names_of(schema: &Schema, ids: &BTreeSet<AttrId>) -> AttrSet {
    ids.iter().filter_map(|id| schema.attribute(id)).map(|a| a.name.clone()).collect()
}

/// Replaces every table that is not in 3NF under its FDs by the fragments
/// of a 3NF synthesis that keeps the declared primary key together. The
/// fragment holding that key keeps the table's ID, name and key columns, so
/// foreign keys into the table stay valid. New fragments get fresh column
/// IDs, key columns first; references to a column that left the table are
/// moved to its first new copy. Each fragment whose key lies inside another
/// fragment receives a foreign key from it.
///
/// The returned FDs are a minimal cover per table. Applying the function to
/// its own output changes nothing.
pub fn normalize_logical(schema: &Schema, fds: &TableFds) -> Result<LogicalDesign, ErError> {
    let report = validate_schema(schema);
    if !report.is_ok() {
        return Err(ErError::InvalidSchema(report.to_string()));
    }
    let mut b = SchemaBuilder::from_schema(schema.clone());
    let mut taken: BTreeSet<String> = schema.relations().iter().map(|r| r.name.clone()).collect();
    let mut out = TableFds::new();

    for rel in schema.relations() {
        let design_err = |reason: String| ErError::InvalidConceptualDesign { table: rel.name.clone(), reason };
        let recorded = fds.get(&rel.id).map(Vec::as_slice).unwrap_or(&[]);
        let f = table_fd_set(schema, &rel.id, recorded)?;
        let pk = schema.primary_key(&rel.id).ok_or_else(|| design_err("no primary key declared".into()))?;
        let pk = names_of(schema, &pk.attrs);
        let keys = candidate_keys(&f)?;
        if !keys.contains(&pk) {
            let listed: Vec<String> = keys.iter().map(|k| format!("{k:?}")).collect();
            return Err(design_err(format!(
                "declared primary key {pk:?} is not a candidate key under its dependencies (candidate keys: {})",
                listed.join(", ")
            )));
        }
        if is_3nf(&f).is_3nf() {
            out.insert(rel.id.clone(), minimal_cover(&f).fds().to_vec());
            continue;
        }

        let d = synthesize_3nf_with_key(&f, &pk)?;
        let main =
            d.fragments.iter().position(|fr| pk.is_subset(&fr.attrs)).expect("synthesis keeps the requested key");
        let original: BTreeMap<String, (AttrId, crate::schema::DataType)> =
            schema.attributes_of(&rel.id).map(|a| (a.name.clone(), (a.id.clone(), a.data_type))).collect();

        let column_order: Vec<String> = schema.attributes_of(&rel.id).map(|a| a.name.clone()).collect();
        let mut placed: BTreeSet<String> = d.fragments[main].attrs.clone();
        let mut relocated: BTreeMap<AttrId, AttrId> = BTreeMap::new();
        let mut tables: Vec<(TableId, BTreeMap<String, AttrId>, AttrSet)> = Vec::new();
        for (i, fr) in d.fragments.iter().enumerate() {
            if i == main {
                let cols = fr.attrs.iter().map(|n| (n.clone(), original[n].0.clone())).collect();
                tables.push((rel.id.clone(), cols, pk.clone()));
                continue;
            }
            let key = fr.keys[0].clone();
            let name = fragment_name(&key, &rel.name, &taken);
            taken.insert(name.clone());
            let tid = b.add_relation(name);
            // key columns first, each group in the original column order
            let ordered = column_order
                .iter()
                .filter(|n| key.contains(*n))
                .chain(column_order.iter().filter(|n| !key.contains(*n) && fr.attrs.contains(*n)));
            let mut cols = BTreeMap::new();
            for n in ordered {
                let (old, t) = &original[n];
                let id = b.add_attribute(&tid, n.clone(), *t);
                if placed.insert(n.clone()) {
                    relocated.insert(old.clone(), id.clone());
                }
                cols.insert(n.clone(), id);
            }
            b.set_primary_key(&tid, key.iter().map(|n| cols[n].clone()));
            tables.push((tid, cols, key));
        }

        // attributes that left the table live on under their new IDs
        let parts = b.parts_mut();
        parts.attributes.retain(|a| !relocated.contains_key(&a.id));
        for fk in &mut parts.foreign_keys {
            for end in [&mut fk.from, &mut fk.to] {
                if let Some(n) = relocated.get(end) {
                    *end = n.clone();
                }
            }
        }
        for dc in &mut parts.domain_constraints {
            if let Some(n) = relocated.get(&dc.attr) {
                dc.attr = n.clone();
            }
        }

        for (i, (_, from_cols, from_key)) in tables.iter().enumerate() {
            for (j, (_, to_cols, to_key)) in tables.iter().enumerate() {
                if i == j || from_key == to_key || !to_key.iter().all(|k| from_cols.contains_key(k)) {
                    continue;
                }
                for k in to_key {
                    b.add_foreign_key(from_cols[k].clone(), to_cols[k].clone());
                }
            }
        }
        for (fr, (tid, _, _)) in d.fragments.iter().zip(&tables) {
            out.insert(tid.clone(), fr.fds.fds().to_vec());
        }
    }
    Ok(LogicalDesign { schema: b.build(), fds: out })
}
