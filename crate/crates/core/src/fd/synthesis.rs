use super::closure::candidate_key_bits;
use super::cover::minimal_cover_bits;
use super::{candidate_keys, is_subset, project, AttrSet, Bits, FdError, FdSet};

/// One relation of a decomposition with its projected FDs and keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub attrs: AttrSet,
    pub fds: FdSet,
    pub keys: Vec<AttrSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub fragments: Vec<Fragment>,
}

impl Decomposition {
    /// Projects `f` onto each attribute set. Does not check coverage.
    pub fn from_attr_sets(f: &FdSet, sets: impl IntoIterator<Item = AttrSet>) -> Result<Self, FdError> {
        let fragments = sets
            .into_iter()
            .map(|attrs| {
                let fds = project(f, &attrs)?;
                let keys = candidate_keys(&fds)?;
                Ok(Fragment { attrs, fds, keys })
            })
            .collect::<Result<Vec<_>, FdError>>()?;
        Ok(Self { fragments })
    }

    pub fn attr_sets(&self) -> Vec<AttrSet> {
        self.fragments.iter().map(|fr| fr.attrs.clone()).collect()
    }
}

/// 3NF synthesis: minimal cover, one fragment per group of FDs sharing a
/// left-hand side, a candidate-key fragment when no fragment holds a key,
/// then removal of fragments contained in another. Fragments are sorted.
pub fn synthesize_3nf(f: &FdSet) -> Result<Decomposition, FdError> {
    synthesize(f, None)
}

/// Like [`synthesize_3nf`], but guarantees that some fragment contains
/// `key`, which must be a candidate key of `f`. Used when a relation's
/// declared primary key has to survive decomposition intact.
pub fn synthesize_3nf_with_key(f: &FdSet, key: &AttrSet) -> Result<Decomposition, FdError> {
    synthesize(f, Some(key))
}

fn synthesize(f: &FdSet, preferred: Option<&AttrSet>) -> Result<Decomposition, FdError> {
    if f.universe().is_empty() {
        return Err(FdError::EmptyUniverse);
    }
    let c = f.compile();
    let cover = minimal_cover_bits(&c.fds);

    let mut groups: Vec<(Bits, Bits)> = Vec::new();
    for (lhs, rhs) in cover {
        match groups.iter_mut().find(|(l, _)| *l == lhs) {
            Some((_, attrs)) => *attrs |= rhs,
            None => groups.push((lhs, lhs | rhs)),
        }
    }
    let mut fragments: Vec<Bits> = groups.into_iter().map(|(_, attrs)| attrs).collect();

    match preferred {
        Some(key) => {
            let key = c.mask(key)?;
            if !fragments.iter().any(|&fr| is_subset(key, fr)) {
                fragments.push(key);
            }
        }
        None => {
            let keys = candidate_key_bits(&c);
            let holds_key = fragments.iter().any(|&fr| keys.iter().any(|&k| is_subset(k, fr)));
            if !holds_key {
                let mut named: Vec<(AttrSet, Bits)> = keys.iter().map(|&k| (c.names_of(k), k)).collect();
                named.sort();
                fragments.push(named[0].1);
            }
        }
    }

    let mut kept: Vec<Bits> = Vec::new();
    for (i, &fr) in fragments.iter().enumerate() {
        let subsumed =
            fragments.iter().enumerate().any(|(j, &other)| j != i && is_subset(fr, other) && (fr != other || j < i));
        if !subsumed {
            kept.push(fr);
        }
    }

    let mut sets: Vec<AttrSet> = kept.into_iter().map(|b| c.names_of(b)).collect();
    sets.sort();
    Decomposition::from_attr_sets(f, sets)
}

#[cfg(test)]
mod tests {
    use super::super::{attrs, Fd};
    use super::*;

    fn set(universe: &[&str], fds: &[(&[&str], &[&str])]) -> FdSet {
        FdSet::new(
            attrs(universe.iter().copied()),
            fds.iter().map(|(l, r)| Fd::new(l.iter().copied(), r.iter().copied())),
        )
        .unwrap()
    }

    #[test]
    fn chain_splits_in_two() {
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"]), (&["B"], &["C"])]);
        let d = synthesize_3nf(&f).unwrap();
        assert_eq!(d.attr_sets(), vec![attrs(["A", "B"]), attrs(["B", "C"])]);
        assert_eq!(d.fragments[0].keys, vec![attrs(["A"])]);
        assert_eq!(d.fragments[1].keys, vec![attrs(["B"])]);
    }

    #[test]
    fn already_normal_relation_stays_whole() {
        let f = set(&["A", "B"], &[(&["A"], &["B"])]);
        assert_eq!(synthesize_3nf(&f).unwrap().attr_sets(), vec![attrs(["A", "B"])]);
    }

    #[test]
    fn no_fds_gives_single_all_key_fragment() {
        let f = set(&["A", "B", "C"], &[]);
        let d = synthesize_3nf(&f).unwrap();
        assert_eq!(d.attr_sets(), vec![attrs(["A", "B", "C"])]);
        assert_eq!(d.fragments[0].keys, vec![attrs(["A", "B", "C"])]);
    }

    #[test]
    fn key_fragment_added_when_missing() {
        // A -> B, C -> D: key is {A, C}, held by neither group
        let f = set(&["A", "B", "C", "D"], &[(&["A"], &["B"]), (&["C"], &["D"])]);
        let d = synthesize_3nf(&f).unwrap();
        assert_eq!(d.attr_sets(), vec![attrs(["A", "B"]), attrs(["A", "C"]), attrs(["C", "D"])]);
    }

    #[test]
    fn preferred_key_is_kept_together() {
        // A <-> B, both keys of {A, B, C} together with C; ask for {B, C}
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"]), (&["B"], &["A"])]);
        let d = synthesize_3nf_with_key(&f, &attrs(["B", "C"])).unwrap();
        assert!(d.attr_sets().iter().any(|s| s.is_superset(&attrs(["B", "C"]))));
        let d = synthesize_3nf(&f).unwrap();
        assert!(d.attr_sets().contains(&attrs(["A", "C"])));
    }
}
