//! ER to logical mapping.
//!
//! * Each entity set becomes a table keyed by its hinted key, by the first
//!   candidate key of its stated FDs, or by a `<name>_id` column (reused when
//!   the entity already has one, added as NUMERIC otherwise).
//! * Binary 1:N relationships fold a foreign key and their attributes into
//!   the MANY side; 1:1 relationships fold into the participant whose name
//!   sorts first.
//! * M:N and n-ary relationships become junction tables keyed by all
//!   participants' keys, each key column referencing its participant.
//!
//! Column-name collisions are resolved by prefixing the relationship name.

use std::collections::BTreeMap;

use super::model::{Cardinality, ConceptualModel, EntitySet, MappingCardinality, RelationshipSet};
use super::{mangle, ErError, LogicalDesign, TableFds};
use crate::fd::{attrs, candidate_keys, AttrSet, Fd, FdSet};
use crate::schema::{DataType, Schema};

/// Key chosen for an entity or relationship set by the FD tools, together
/// with every candidate key found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetKey {
    pub set: String,
    pub key: Vec<String>,
    pub candidates: Vec<Vec<String>>,
    /// The key is a generated `<name>_id` column not present in the model.
    pub surrogate: bool,
}

fn ordered(set: &AttrSet, order: &[String]) -> Vec<String> {
    order.iter().filter(|n| set.contains(*n)).cloned().collect()
}

fn resolve_fd(set: &str, fd: &super::ErFd, universe: &AttrSet) -> Result<Fd, ErError> {
    if let Some(bad) = fd.lhs.iter().chain(&fd.rhs).find(|n| !universe.contains(*n)) {
        return Err(ErError::UnknownAttribute { set: set.to_string(), attr: bad.clone() });
    }
    if fd.lhs.is_empty() || fd.rhs.is_empty() {
        return Err(ErError::Fd(if fd.lhs.is_empty() {
            crate::fd::FdError::EmptyLhs
        } else {
            crate::fd::FdError::EmptyRhs
        }));
    }
    Ok(Fd::new(fd.lhs.iter().cloned(), fd.rhs.iter().cloned()))
}

fn entity_key(e: &EntitySet) -> Result<SetKey, ErError> {
    if e.attributes.is_empty() {
        return Err(ErError::Keyless(e.name.clone()));
    }
    let order: Vec<String> = e.attributes.iter().map(|a| a.name.clone()).collect();
    let universe = attrs(order.iter().cloned());
    let mut fds = e.fds.iter().map(|fd| resolve_fd(&e.name, fd, &universe)).collect::<Result<Vec<_>, _>>()?;

    if let Some(hint) = &e.key_hint {
        if hint.is_empty() {
            return Err(ErError::ContradictoryKey { set: e.name.clone(), reason: "declared key is empty".into() });
        }
        if let Some(bad) = hint.iter().find(|n| !universe.contains(*n)) {
            return Err(ErError::UnknownAttribute { set: e.name.clone(), attr: bad.clone() });
        }
        let key = attrs(hint.iter().cloned());
        let rest: AttrSet = universe.difference(&key).cloned().collect();
        if !rest.is_empty() {
            fds.push(Fd { lhs: key.clone(), rhs: rest });
        }
        let keys = candidate_keys(&FdSet::new(universe, fds)?)?;
        if !keys.contains(&key) {
            let listed: Vec<String> = keys.iter().map(|k| format!("{k:?}")).collect();
            return Err(ErError::ContradictoryKey {
                set: e.name.clone(),
                reason: format!(
                    "declared key {:?} is not minimal under the stated dependencies (candidate keys: {})",
                    hint,
                    listed.join(", ")
                ),
            });
        }
        return Ok(SetKey {
            set: e.name.clone(),
            key: ordered(&key, &order),
            candidates: keys.iter().map(|k| ordered(k, &order)).collect(),
            surrogate: false,
        });
    }

    if !fds.is_empty() {
        let keys = candidate_keys(&FdSet::new(universe, fds)?)?;
        let candidates: Vec<Vec<String>> = keys.iter().map(|k| ordered(k, &order)).collect();
        return Ok(SetKey { set: e.name.clone(), key: candidates[0].clone(), candidates, surrogate: false });
    }

    let wanted = format!("{}_id", mangle(&e.name));
    let existing = e
        .attributes
        .iter()
        .find(|a| mangle(&a.name) == wanted)
        .or_else(|| e.attributes.iter().find(|a| mangle(&a.name) == "id"));
    let (key, surrogate) = match existing {
        Some(a) => (a.name.clone(), false),
        None => (wanted, true),
    };
    Ok(SetKey { set: e.name.clone(), key: vec![key.clone()], candidates: vec![vec![key]], surrogate })
}

/// First tool call: a key for every entity set.
pub fn entity_keys(m: &ConceptualModel) -> Result<Vec<SetKey>, ErError> {
    m.entity_sets.iter().map(entity_key).collect()
}

fn check_relationship<'m>(
    m: &'m ConceptualModel,
    r: &RelationshipSet,
) -> Result<Vec<(usize, &'m EntitySet, Cardinality)>, ErError> {
    if r.participants.len() < 2 {
        return Err(ErError::TooFewParticipants(r.name.clone()));
    }
    r.participants
        .iter()
        .map(|p| {
            let idx = m.entity_sets.iter().position(|e| e.name == p.entity).ok_or_else(|| {
                ErError::UnresolvableParticipant { relationship: r.name.clone(), entity: p.entity.clone() }
            })?;
            let card = p.cardinality().ok_or_else(|| ErError::MissingCardinality(r.name.clone()))?;
            Ok((idx, &m.entity_sets[idx], card))
        })
        .collect()
}

fn is_junction(r: &RelationshipSet) -> bool {
    !matches!(
        r.mapping(),
        Some(MappingCardinality::OneToOne | MappingCardinality::OneToMany | MappingCardinality::ManyToOne)
    )
}

/// Second tool call: a key for every relationship set, over participant key
/// attributes qualified as `Entity.attr` plus the relationship's own
/// attributes. Junction relationships must keep the full composite key;
/// folded ones are keyed by the side that receives the foreign key.
pub fn relationship_keys(m: &ConceptualModel, entity_keys: &[SetKey]) -> Result<Vec<SetKey>, ErError> {
    let mut out = Vec::new();
    for r in &m.relationship_sets {
        let parts = check_relationship(m, r)?;
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut qualified: Vec<Vec<String>> = Vec::new();
        for (idx, e, _) in &parts {
            let n = seen.entry(e.name.as_str()).or_insert(0);
            *n += 1;
            let label = if *n == 1 { e.name.clone() } else { format!("{}#{n}", e.name) };
            qualified.push(entity_keys[*idx].key.iter().map(|k| format!("{label}.{k}")).collect());
        }
        let own: Vec<String> = r.attributes.iter().map(|a| a.name.clone()).collect();
        let order: Vec<String> = qualified.iter().flatten().cloned().chain(own.iter().cloned()).collect();
        let universe = attrs(order.iter().cloned());

        let lookup = |name: &String| -> Option<String> {
            if own.contains(name) {
                return Some(name.clone());
            }
            parts
                .iter()
                .zip(&qualified)
                .find_map(|((idx, _, _), q)| entity_keys[*idx].key.iter().position(|k| k == name).map(|i| q[i].clone()))
        };
        let mut fds = Vec::new();
        for fd in &r.fds {
            let map = |names: &[String]| -> Result<Vec<String>, ErError> {
                names
                    .iter()
                    .map(|n| {
                        lookup(n).ok_or_else(|| ErError::UnknownAttribute { set: r.name.clone(), attr: n.clone() })
                    })
                    .collect()
            };
            fds.push(Fd::new(map(&fd.lhs)?, map(&fd.rhs)?));
        }

        let key: AttrSet = if is_junction(r) {
            qualified.iter().flatten().cloned().collect()
        } else {
            let host = fold_host(r, &parts);
            let other = 1 - host;
            let k = attrs(qualified[host].iter().cloned());
            if parts[0].2 == Cardinality::One && parts[1].2 == Cardinality::One {
                fds.push(Fd::new(qualified[other].iter().cloned(), qualified[host].iter().cloned()));
            }
            k
        };
        let rest: AttrSet = universe.difference(&key).cloned().collect();
        if !rest.is_empty() {
            fds.push(Fd { lhs: key.clone(), rhs: rest });
        }
        let keys = candidate_keys(&FdSet::new(universe, fds)?)?;
        if !keys.contains(&key) {
            return Err(ErError::ContradictoryKey {
                set: r.name.clone(),
                reason: "the relationship's dependencies make part of its participants' keys redundant; \
                         check the mapping cardinality"
                    .into(),
            });
        }
        out.push(SetKey {
            set: r.name.clone(),
            key: ordered(&key, &order),
            candidates: keys.iter().map(|k| ordered(k, &order)).collect(),
            surrogate: false,
        });
    }
    Ok(out)
}

/// Index (0 or 1) of the participant that receives the foreign key of a
/// folded binary relationship.
fn fold_host(r: &RelationshipSet, parts: &[(usize, &EntitySet, Cardinality)]) -> usize {
    match r.mapping() {
        Some(MappingCardinality::ManyToOne) => 0,
        Some(MappingCardinality::OneToMany) => 1,
        _ => {
            if parts[1].1.name < parts[0].1.name {
                1
            } else {
                0
            }
        }
    }
}

struct Draft {
    name: String,
    columns: Vec<(String, DataType)>,
    pk: Vec<String>,
    fks: Vec<(Vec<String>, usize, Vec<String>)>,
    fds: Vec<Fd>,
}

impl Draft {
    fn new(name: String) -> Self {
        Self { name, columns: Vec::new(), pk: Vec::new(), fks: Vec::new(), fds: Vec::new() }
    }

    fn has(&self, col: &str) -> bool {
        self.columns.iter().any(|(c, _)| c == col)
    }

    fn column_type(&self, col: &str) -> Option<DataType> {
        self.columns.iter().find(|(c, _)| c == col).map(|(_, t)| *t)
    }

    fn is_fk_column(&self, col: &str) -> bool {
        self.fks.iter().any(|(from, _, _)| from.iter().any(|c| c == col))
    }

    /// Adds a column named `wanted`, or `<prefix>_<wanted>` (then numbered)
    /// when taken. Returns the name used.
    fn add_column(&mut self, wanted: &str, prefix: &str, t: DataType) -> String {
        let mut name = wanted.to_string();
        if self.has(&name) {
            name = format!("{prefix}_{wanted}");
            let mut n = 2;
            while self.has(&name) {
                name = format!("{prefix}_{wanted}_{n}");
                n += 1;
            }
        }
        self.columns.push((name.clone(), t));
        name
    }
}

fn unique_table_name(drafts: &[Draft], wanted: String) -> String {
    let taken = |n: &str| drafts.iter().any(|d| d.name == n);
    if !taken(&wanted) {
        return wanted;
    }
    (2..).map(|n| format!("{wanted}_{n}")).find(|n| !taken(n)).expect("unbounded range")
}

/// Maps a reviewed conceptual model to a logical schema plus the FDs known
/// on each table. Deterministic: the same model yields the same schema.
pub fn map_to_logical(m: &ConceptualModel) -> Result<LogicalDesign, ErError> {
    let ekeys = entity_keys(m)?;
    relationship_keys(m, &ekeys)?;

    let mut drafts: Vec<Draft> = Vec::new();
    // conceptual attribute name -> column name, per entity
    let mut columns_of: Vec<BTreeMap<String, String>> = Vec::new();
    for (e, k) in m.entity_sets.iter().zip(&ekeys) {
        let mut d = Draft::new(unique_table_name(&drafts, mangle(&e.name)));
        let mut names = BTreeMap::new();
        if k.surrogate {
            let col = d.add_column(&k.key[0], "key", DataType::Numeric);
            names.insert(k.key[0].clone(), col);
        }
        for a in &e.attributes {
            let col = d.add_column(&mangle(&a.name), "col", a.data_type);
            names.insert(a.name.clone(), col);
        }
        d.pk = k.key.iter().map(|n| names[n].clone()).collect();
        for fd in &e.fds {
            let map = |s: &[String]| s.iter().map(|n| names[n].clone()).collect::<Vec<_>>();
            d.fds.push(Fd::new(map(&fd.lhs), map(&fd.rhs)));
        }
        drafts.push(d);
        columns_of.push(names);
    }

    for r in &m.relationship_sets {
        let parts = check_relationship(m, r)?;
        let prefix = mangle(&r.name);
        // participant key attribute (conceptual name) -> column in the table holding the relationship
        let mut key_cols: Vec<(String, String)> = Vec::new();
        let host_idx = if is_junction(r) {
            let mut d = Draft::new(unique_table_name(&drafts, prefix.clone()));
            for (idx, _, _) in &parts {
                let target = &drafts[*idx];
                let target_cols: Vec<String> = target.pk.clone();
                let mut from = Vec::new();
                for tc in &target_cols {
                    let t = target.column_type(tc).expect("key column exists");
                    let col = d.add_column(tc, &prefix, t);
                    key_cols.push((tc.clone(), col.clone()));
                    from.push(col);
                }
                d.pk.extend(from.iter().cloned());
                d.fks.push((from, *idx, target_cols));
            }
            drafts.push(d);
            drafts.len() - 1
        } else {
            let host = fold_host(r, &parts);
            let (host_idx, ref_idx) = (parts[host].0, parts[1 - host].0);
            let target_cols = drafts[ref_idx].pk.clone();
            let mut from = Vec::new();
            for tc in &target_cols {
                let t = drafts[ref_idx].column_type(tc).expect("key column exists");
                let d = &mut drafts[host_idx];
                let reusable = host_idx != ref_idx && d.column_type(tc) == Some(t) && !d.is_fk_column(tc);
                let col = if reusable { tc.clone() } else { d.add_column(tc, &prefix, t) };
                key_cols.push((tc.clone(), col.clone()));
                from.push(col);
            }
            for hc in drafts[host_idx].pk.clone() {
                key_cols.push((hc.clone(), hc));
            }
            drafts[host_idx].fks.push((from, ref_idx, target_cols));
            host_idx
        };

        let mut own: BTreeMap<String, String> = BTreeMap::new();
        for a in &r.attributes {
            let col = drafts[host_idx].add_column(&mangle(&a.name), &prefix, a.data_type);
            own.insert(a.name.clone(), col);
        }
        for fd in &r.fds {
            let resolve = |n: &String| -> Result<String, ErError> {
                if let Some(c) = own.get(n) {
                    return Ok(c.clone());
                }
                let wanted = parts.iter().find_map(|(idx, _, _)| columns_of[*idx].get(n)).unwrap_or(n);
                key_cols
                    .iter()
                    .find(|(k, _)| k == wanted)
                    .map(|(_, c)| c.clone())
                    .ok_or_else(|| ErError::UnknownAttribute { set: r.name.clone(), attr: n.clone() })
            };
            let lhs = fd.lhs.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;
            let rhs = fd.rhs.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;
            drafts[host_idx].fds.push(Fd::new(lhs, rhs));
        }
    }

    for d in &mut drafts {
        let key = attrs(d.pk.iter().cloned());
        let rest: AttrSet = d.columns.iter().map(|(c, _)| c.clone()).filter(|c| !key.contains(c)).collect();
        if !rest.is_empty() {
            d.fds.push(Fd { lhs: key, rhs: rest });
        }
    }
    Ok(materialize(drafts))
}

fn materialize(drafts: Vec<Draft>) -> LogicalDesign {
    let mut b = Schema::builder();
    let mut ids = Vec::new();
    for d in &drafts {
        let tid = b.add_relation(d.name.clone());
        let cols: BTreeMap<String, _> =
            d.columns.iter().map(|(c, t)| (c.clone(), b.add_attribute(&tid, c.clone(), *t))).collect();
        b.set_primary_key(&tid, d.pk.iter().map(|c| cols[c].clone()));
        ids.push((tid, cols));
    }
    let mut fds = TableFds::new();
    for (d, (tid, cols)) in drafts.iter().zip(&ids) {
        for (from, target, to) in &d.fks {
            for (f, t) in from.iter().zip(to) {
                b.add_foreign_key(cols[f].clone(), ids[*target].1[t].clone());
            }
        }
        fds.insert(tid.clone(), d.fds.clone());
    }
    LogicalDesign { schema: b.build(), fds }
}
