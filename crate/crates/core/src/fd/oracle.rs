//! Exhaustive reference implementations for testing the FD engine.
//!
//! These deliberately take a different route from the main algorithms:
//! closure is the intersection of every FD-closed superset, and candidate keys
//! are found by scanning all subsets. Both are exponential and capped at
//! ten attributes.

use super::{AttrSet, FdError, FdSet};

pub const ORACLE_LIMIT: usize = 10;

fn check_size(f: &FdSet) -> Result<(), FdError> {
    let n = f.universe().len();
    if n > ORACLE_LIMIT {
        Err(FdError::OracleTooLarge(n))
    } else {
        Ok(())
    }
}

fn subsets(universe: &[String]) -> impl Iterator<Item = AttrSet> + '_ {
    (0u32..(1u32 << universe.len())).map(move |bits| {
        universe.iter().enumerate().filter(|&(i, _)| bits & (1 << i) != 0).map(|(_, a)| a.clone()).collect()
    })
}

/// Whether `s` is closed: every FD whose left side lies in `s` has its right
/// side in `s` too.
fn is_closed(s: &AttrSet, f: &FdSet) -> bool {
    f.fds().iter().all(|fd| !fd.lhs.is_subset(s) || fd.rhs.is_subset(s))
}

pub fn oracle_closure(attrs: &AttrSet, f: &FdSet) -> Result<AttrSet, FdError> {
    check_size(f)?;
    if let Some(a) = attrs.iter().find(|a| !f.universe().contains(*a)) {
        return Err(FdError::UnknownAttribute(a.clone()));
    }
    let universe: Vec<String> = f.universe().iter().cloned().collect();
    let mut result = f.universe().clone();
    for s in subsets(&universe) {
        if attrs.is_subset(&s) && is_closed(&s, f) {
            result = result.intersection(&s).cloned().collect();
        }
    }
    Ok(result)
}

pub fn oracle_candidate_keys(f: &FdSet) -> Result<Vec<AttrSet>, FdError> {
    check_size(f)?;
    let universe: Vec<String> = f.universe().iter().cloned().collect();
    let mut superkeys = Vec::new();
    for s in subsets(&universe) {
        if &oracle_closure(&s, f)? == f.universe() {
            superkeys.push(s);
        }
    }
    let mut keys: Vec<AttrSet> = superkeys
        .iter()
        .filter(|k| !superkeys.iter().any(|other| other != *k && other.is_subset(k)))
        .cloned()
        .collect();
    keys.sort();
    Ok(keys)
}
