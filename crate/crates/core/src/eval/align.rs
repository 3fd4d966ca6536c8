use std::collections::{BTreeMap, BTreeSet};

use super::names::{names_match, MatcherConfig};
use crate::schema::{AttrId, Schema, TableId};

/// Injective gold-to-predicted maps for tables and, inside matched tables,
/// attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    /// (gold, predicted) pairs in gold order.
    pub tables: Vec<(TableId, TableId)>,
    /// Gold table -> (gold, predicted) attribute pairs.
    pub attributes: BTreeMap<TableId, Vec<(AttrId, AttrId)>>,
}

impl Alignment {
    pub fn table(&self, gold: &TableId) -> Option<&TableId> {
        self.tables.iter().find(|(g, _)| g == gold).map(|(_, p)| p)
    }

    pub fn attr(&self, gold: &AttrId) -> Option<&AttrId> {
        self.attributes.values().flatten().find(|(g, _)| g == gold).map(|(_, p)| p)
    }

    pub fn matched_attribute_count(&self) -> usize {
        self.attributes.values().map(Vec::len).sum()
    }
}

/// Greedy matching: gold items in canonical order each claim the first
/// unclaimed predicted item (also in canonical order) whose name matches.
pub fn align(gold: &Schema, pred: &Schema, cfg: &MatcherConfig) -> Alignment {
    let mut out = Alignment::default();
    let mut claimed: BTreeSet<&TableId> = BTreeSet::new();
    for g in gold.relations() {
        let hit = pred.relations().iter().find(|p| !claimed.contains(&p.id) && names_match(&p.name, &g.name, cfg));
        let Some(p) = hit else { continue };
        claimed.insert(&p.id);
        out.tables.push((g.id.clone(), p.id.clone()));

        let mut taken: BTreeSet<&AttrId> = BTreeSet::new();
        let mut pairs = Vec::new();
        let pred_attrs: Vec<_> = pred.attributes_of(&p.id).collect();
        for ga in gold.attributes_of(&g.id) {
            if let Some(pa) =
                pred_attrs.iter().find(|pa| !taken.contains(&pa.id) && names_match(&pa.name, &ga.name, cfg))
            {
                taken.insert(&pa.id);
                pairs.push((ga.id.clone(), pa.id.clone()));
            }
        }
        out.attributes.insert(g.id.clone(), pairs);
    }
    out
}

/// Pairs every table and attribute with itself.
pub fn identity_alignment(s: &Schema) -> Alignment {
    Alignment {
        tables: s.relations().iter().map(|r| (r.id.clone(), r.id.clone())).collect(),
        attributes: s
            .relations()
            .iter()
            .map(|r| (r.id.clone(), s.attributes_of(&r.id).map(|a| (a.id.clone(), a.id.clone())).collect()))
            .collect(),
    }
}
