//! Table, attribute, key and type metrics over an [`Alignment`].
//!
//! Conventions for degenerate inputs: F1 is 1 when both sides are empty and
//! 0 when exactly one is; `fk_acc` is 1 when neither schema has foreign
//! keys; `dt_acc` is 1 when neither schema has attributes and 0 when some
//! exist but none matched.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::align::{align, Alignment};
use super::names::MatcherConfig;
use crate::schema::{AttrId, Schema};

/// F1 from the matched count and the two set sizes.
pub fn f1_from_counts(matched: usize, gold: usize, pred: usize) -> f64 {
    if gold == 0 && pred == 0 {
        return 1.0;
    }
    if matched == 0 {
        return 0.0;
    }
    let p = matched as f64 / pred as f64;
    let r = matched as f64 / gold as f64;
    2.0 * p * r / (p + r)
}

fn exact(matched: usize, gold: usize, pred: usize) -> bool {
    matched == gold && matched == pred
}

fn acc(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// (F1, Acc) over tables, counting matched pairs as the intersection.
pub fn table_metrics(gold: &Schema, pred: &Schema, a: &Alignment) -> (f64, f64) {
    let (m, g, p) = (a.tables.len(), gold.relations().len(), pred.relations().len());
    (f1_from_counts(m, g, p), acc(exact(m, g, p)))
}

/// Mean per-gold-table attribute F1; unmatched gold tables contribute 0.
pub fn attribute_metrics(gold: &Schema, pred: &Schema, a: &Alignment) -> (f64, f64) {
    if gold.relations().is_empty() {
        let vacuous = pred.relations().is_empty();
        return (acc(vacuous), acc(vacuous));
    }
    let mut sum = 0.0;
    let mut all_exact = true;
    for g in gold.relations() {
        let Some(p) = a.table(&g.id) else {
            all_exact = false;
            continue;
        };
        let m = a.attributes.get(&g.id).map_or(0, Vec::len);
        let (gn, pn) = (gold.attributes_of(&g.id).count(), pred.attributes_of(p).count());
        sum += f1_from_counts(m, gn, pn);
        all_exact &= exact(m, gn, pn);
    }
    (sum / gold.relations().len() as f64, acc(all_exact))
}

/// (pk_acc, fk_acc): complete agreement of keys under the alignment.
pub fn key_metrics(gold: &Schema, pred: &Schema, a: &Alignment) -> (f64, f64) {
    let pk_ok = gold.relations().iter().all(|g| {
        let Some(p) = a.table(&g.id) else { return false };
        match (gold.primary_key(&g.id), pred.primary_key(p)) {
            (None, None) => true,
            (Some(gk), Some(pk)) => {
                let mapped: Option<BTreeSet<&AttrId>> = gk.attrs.iter().map(|x| a.attr(x)).collect();
                mapped.is_some_and(|m| m == pk.attrs.iter().collect())
            }
            _ => false,
        }
    });
    let mapped: Option<BTreeSet<(&AttrId, &AttrId)>> =
        gold.foreign_keys().iter().map(|fk| Some((a.attr(&fk.from)?, a.attr(&fk.to)?))).collect();
    let pred_fks: BTreeSet<(&AttrId, &AttrId)> = pred.foreign_keys().iter().map(|fk| (&fk.from, &fk.to)).collect();
    let fk_ok = mapped.is_some_and(|m| m == pred_fks);
    (acc(pk_ok), acc(fk_ok))
}

/// Share of matched attribute pairs with equal types.
pub fn datatype_metrics(gold: &Schema, pred: &Schema, a: &Alignment) -> f64 {
    let pairs: Vec<_> = a.attributes.values().flatten().collect();
    if pairs.is_empty() {
        return acc(gold.attributes().is_empty() && pred.attributes().is_empty());
    }
    let same = pairs
        .iter()
        .filter(|(g, p)| {
            let gt = gold.attribute(g).map(|x| x.data_type);
            gt.is_some() && gt == pred.attribute(p).map(|x| x.data_type)
        })
        .count();
    same as f64 / pairs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub table_f1: f64,
    pub table_acc: f64,
    pub attr_f1: f64,
    pub attr_acc: f64,
    pub pk_acc: f64,
    pub fk_acc: f64,
    pub dt_acc: f64,
}

impl EvalReport {
    pub const COLUMNS: [&'static str; 7] =
        ["table_f1", "table_acc", "attr_f1", "attr_acc", "pk_acc", "fk_acc", "dt_acc"];

    pub fn values(&self) -> [f64; 7] {
        [self.table_f1, self.table_acc, self.attr_f1, self.attr_acc, self.pk_acc, self.fk_acc, self.dt_acc]
    }

    pub fn from_alignment(gold: &Schema, pred: &Schema, a: &Alignment) -> Self {
        let (table_f1, table_acc) = table_metrics(gold, pred, a);
        let (attr_f1, attr_acc) = attribute_metrics(gold, pred, a);
        let (pk_acc, fk_acc) = key_metrics(gold, pred, a);
        let dt_acc = datatype_metrics(gold, pred, a);
        Self { table_f1, table_acc, attr_f1, attr_acc, pk_acc, fk_acc, dt_acc }
    }

    /// Column-wise mean; the default report for an empty slice.
    pub fn mean(reports: &[EvalReport]) -> Self {
        if reports.is_empty() {
            return Self::default();
        }
        let n = reports.len() as f64;
        let mut sums = [0.0; 7];
        for r in reports {
            for (s, v) in sums.iter_mut().zip(r.values()) {
                *s += v;
            }
        }
        let m = sums.map(|s| s / n);
        Self {
            table_f1: m[0],
            table_acc: m[1],
            attr_f1: m[2],
            attr_acc: m[3],
            pk_acc: m[4],
            fk_acc: m[5],
            dt_acc: m[6],
        }
    }
}

/// Aligns `pred` against `gold` and computes every metric.
pub fn evaluate(gold: &Schema, pred: &Schema, cfg: &MatcherConfig) -> EvalReport {
    EvalReport::from_alignment(gold, pred, &align(gold, pred, cfg))
}
