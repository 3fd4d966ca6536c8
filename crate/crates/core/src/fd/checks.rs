use super::closure::candidate_key_bits;
use super::{is_subset, iter_bits, AttrSet, Bits, Fd, FdError, FdSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeNfReport {
    /// Offending `X -> A` dependencies (singleton right-hand sides).
    pub violations: Vec<Fd>,
}

impl ThreeNfReport {
    pub fn is_3nf(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Third-normal-form test: every nontrivial `X -> A` must have a superkey
/// `X` or a prime `A`. Checking the FDs of `f` (right-hand sides split)
/// suffices: if an implied `X -> A` violates the condition, the FD that first
/// adds `A` while computing `X⁺` violates it as well.
pub fn is_3nf(f: &FdSet) -> ThreeNfReport {
    let c = f.compile();
    let full = c.full();
    let prime: Bits =
        if f.universe().is_empty() { 0 } else { candidate_key_bits(&c).into_iter().fold(0, |acc, k| acc | k) };
    let mut violations = Vec::new();
    for &(lhs, rhs) in &c.fds {
        if c.closure(lhs) == full {
            continue;
        }
        for a in iter_bits(rhs & !lhs & !prime) {
            let fd = c.fd(lhs, 1 << a);
            if !violations.contains(&fd) {
                violations.push(fd);
            }
        }
    }
    violations.sort();
    ThreeNfReport { violations }
}

fn fragment_masks(f: &FdSet, fragments: &[AttrSet]) -> Result<Vec<Bits>, FdError> {
    let c = f.compile();
    fragments.iter().map(|fr| c.mask(fr)).collect()
}

/// Lossless-join test by the chase. One tableau row per fragment; a row holds
/// the distinguished symbol in the fragment's columns. FDs equate symbols
/// until nothing changes; the join is lossless iff some row becomes fully
/// distinguished.
pub fn is_lossless(f: &FdSet, fragments: &[AttrSet]) -> Result<bool, FdError> {
    let masks = fragment_masks(f, fragments)?;
    let c = f.compile();
    let covered = masks.iter().fold(0, |acc, m| acc | m);
    if covered != c.full() {
        let missing = c.names_of(c.full() & !covered).into_iter().collect();
        return Err(FdError::NotCovering(missing));
    }
    let width = c.names.len();
    if masks.iter().any(|&m| m == c.full()) {
        return Ok(true);
    }

    // 0 is the distinguished symbol; every other cell starts unique.
    let mut table: Vec<Vec<usize>> = masks
        .iter()
        .enumerate()
        .map(|(i, &m)| (0..width).map(|j| if m & (1 << j) != 0 { 0 } else { 1 + i * width + j }).collect())
        .collect();

    let mut changed = true;
    while changed {
        changed = false;
        for &(lhs, rhs) in &c.fds {
            for r1 in 0..table.len() {
                for r2 in r1 + 1..table.len() {
                    if !iter_bits(lhs).all(|j| table[r1][j] == table[r2][j]) {
                        continue;
                    }
                    for j in iter_bits(rhs) {
                        let (x, y) = (table[r1][j], table[r2][j]);
                        if x == y {
                            continue;
                        }
                        let (keep, drop) = (x.min(y), x.max(y));
                        for row in table.iter_mut() {
                            if row[j] == drop {
                                row[j] = keep;
                            }
                        }
                        changed = true;
                    }
                }
            }
        }
        if table.iter().any(|row| row.iter().all(|&s| s == 0)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether the FDs projected onto the fragments jointly imply `f`. For each
/// `X -> Y` in `f`, grows `Z = X` by `((Z ∩ Ri)⁺ ∩ Ri)` over all fragments
/// until stable; the FD is preserved iff `Y ⊆ Z`. This avoids materializing
/// the projections.
pub fn is_dependency_preserving(f: &FdSet, fragments: &[AttrSet]) -> Result<bool, FdError> {
    let masks = fragment_masks(f, fragments)?;
    let c = f.compile();
    for &(lhs, rhs) in &c.fds {
        let mut z = lhs;
        loop {
            let before = z;
            for &m in &masks {
                z |= c.closure(z & m) & m;
            }
            if z == before {
                break;
            }
        }
        if !is_subset(rhs, z) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::{attrs, synthesize_3nf};
    use super::*;

    fn set(universe: &[&str], fds: &[(&[&str], &[&str])]) -> FdSet {
        FdSet::new(
            attrs(universe.iter().copied()),
            fds.iter().map(|(l, r)| Fd::new(l.iter().copied(), r.iter().copied())),
        )
        .unwrap()
    }

    #[test]
    fn transitive_dependency_violates_3nf() {
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"]), (&["B"], &["C"])]);
        let r = is_3nf(&f);
        assert!(!r.is_3nf());
        assert_eq!(r.violations, vec![Fd::new(["B"], ["C"])]);
    }

    #[test]
    fn prime_rhs_is_allowed() {
        let f = set(&["A", "B", "C"], &[(&["A", "B"], &["C"]), (&["C"], &["A"])]);
        assert!(is_3nf(&f).is_3nf());
    }

    #[test]
    fn no_fds_is_3nf() {
        assert!(is_3nf(&set(&["A", "B"], &[])).is_3nf());
    }

    #[test]
    fn chase_examples() {
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"])]);
        assert!(is_lossless(&f, &[attrs(["A", "B"]), attrs(["A", "C"])]).unwrap());

        let f = set(&["A", "B", "C"], &[]);
        assert!(!is_lossless(&f, &[attrs(["A", "B"]), attrs(["B", "C"])]).unwrap());

        assert!(is_lossless(&f, &[attrs(["A"]), attrs(["A", "B", "C"])]).unwrap());
    }

    #[test]
    fn chase_needs_multiple_passes() {
        // A -> B, B -> C over {A,B}, {B,C}, {A,D}... join via A then B
        let f = set(&["A", "B", "C", "D"], &[(&["A"], &["B"]), (&["B"], &["C"])]);
        let frags = [attrs(["B", "C"]), attrs(["A", "B"]), attrs(["A", "D"])];
        assert!(is_lossless(&f, &frags).unwrap());
    }

    #[test]
    fn lossless_requires_cover() {
        let f = set(&["A", "B", "C"], &[]);
        assert_eq!(is_lossless(&f, &[attrs(["A", "B"])]), Err(FdError::NotCovering(vec!["C".into()])));
    }

    #[test]
    fn preservation_examples() {
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"]), (&["B"], &["C"])]);
        let d = synthesize_3nf(&f).unwrap();
        assert!(is_dependency_preserving(&f, &d.attr_sets()).unwrap());
        assert!(!is_dependency_preserving(&f, &[attrs(["A", "B"]), attrs(["A", "C"])]).unwrap());

        let empty = set(&["A", "B", "C"], &[]);
        assert!(is_dependency_preserving(&empty, &[attrs(["A"]), attrs(["B", "C"])]).unwrap());
    }
}
