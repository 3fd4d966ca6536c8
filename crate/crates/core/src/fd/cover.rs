use super::{closure_bits, is_subset, iter_bits, Bits, Compiled, FdError, FdSet, MAX_PROJECTION_WIDTH};

/// Canonical minimal cover: singleton right-hand sides, no extraneous
/// left-hand attributes, no redundant FDs. Ties between equally minimal
/// covers are broken by input order (earlier FDs are reduced first and kept
/// in preference to later ones). Output is sorted.
pub fn minimal_cover(f: &FdSet) -> FdSet {
    let c = f.compile();
    let cover = minimal_cover_bits(&c.fds);
    to_sorted_set(f, &c, &cover)
}

pub(crate) fn minimal_cover_bits(fds: &[(Bits, Bits)]) -> Vec<(Bits, Bits)> {
    let mut split: Vec<(Bits, Bits)> = Vec::new();
    for &(lhs, rhs) in fds {
        for i in iter_bits(rhs & !lhs) {
            let fd = (lhs, 1 << i);
            if !split.contains(&fd) {
                split.push(fd);
            }
        }
    }

    for i in 0..split.len() {
        let (mut lhs, rhs) = split[i];
        for b in iter_bits(lhs) {
            let reduced = lhs & !(1 << b);
            if reduced != 0 && is_subset(rhs, closure_bits(&split, reduced)) {
                lhs = reduced;
                split[i] = (lhs, rhs);
            }
        }
    }
    let mut reduced: Vec<(Bits, Bits)> = Vec::new();
    for fd in split {
        if !reduced.contains(&fd) {
            reduced.push(fd);
        }
    }

    let mut i = 0;
    while i < reduced.len() {
        let (lhs, rhs) = reduced[i];
        let rest: Vec<(Bits, Bits)> = reduced.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &fd)| fd).collect();
        if is_subset(rhs, closure_bits(&rest, lhs)) {
            reduced.remove(i);
        } else {
            i += 1;
        }
    }
    reduced
}

/// FDs of `f` restricted to `onto`: every `X -> (X⁺ ∩ onto) − X` for
/// `X ⊆ onto`, reduced to a minimal cover. Exponential in `|onto|`.
pub fn project(f: &FdSet, onto: &super::AttrSet) -> Result<FdSet, FdError> {
    if onto.len() > MAX_PROJECTION_WIDTH {
        return Err(FdError::ProjectionTooLarge(onto.len()));
    }
    let c = f.compile();
    let target = c.mask(onto)?;
    let members: Vec<usize> = iter_bits(target).collect();
    let mut projected = Vec::new();
    for subset in 1u64..(1u64 << members.len()) {
        let x =
            members.iter().enumerate().filter(|&(k, _)| subset & (1 << k) != 0).fold(0, |acc, (_, &i)| acc | (1 << i));
        let implied = c.closure(x) & target & !x;
        if implied != 0 {
            projected.push((x, implied));
        }
    }
    let cover = minimal_cover_bits(&projected);
    let fds = cover.iter().map(|&(l, r)| c.fd(l, r));
    let mut fds: Vec<_> = fds.collect();
    fds.sort();
    FdSet::new(onto.clone(), fds)
}

fn to_sorted_set(f: &FdSet, c: &Compiled, fds: &[(Bits, Bits)]) -> FdSet {
    let mut out: Vec<_> = fds.iter().map(|&(l, r)| c.fd(l, r)).collect();
    out.sort();
    FdSet::new(f.universe().clone(), out).expect("cover stays within the universe")
}

#[cfg(test)]
mod tests {
    use super::super::{attrs, equivalent, Fd};
    use super::*;

    fn set(universe: &[&str], fds: &[(&[&str], &[&str])]) -> FdSet {
        FdSet::new(
            attrs(universe.iter().copied()),
            fds.iter().map(|(l, r)| Fd::new(l.iter().copied(), r.iter().copied())),
        )
        .unwrap()
    }

    #[test]
    fn splits_right_hand_sides() {
        let f = set(&["A", "B", "C"], &[(&["A"], &["B", "C"])]);
        assert_eq!(minimal_cover(&f).fds(), &[Fd::new(["A"], ["B"]), Fd::new(["A"], ["C"])]);
    }

    #[test]
    fn drops_transitively_implied_fd() {
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"]), (&["B"], &["C"]), (&["A"], &["C"])]);
        assert_eq!(minimal_cover(&f).fds(), &[Fd::new(["A"], ["B"]), Fd::new(["B"], ["C"])]);
    }

    #[test]
    fn removes_extraneous_lhs_attribute() {
        let f = set(&["A", "B", "C"], &[(&["A", "B"], &["C"]), (&["A"], &["B"])]);
        let cover = minimal_cover(&f);
        assert_eq!(cover.fds(), &[Fd::new(["A"], ["B"]), Fd::new(["A"], ["C"])]);
        assert!(equivalent(&f, &cover).unwrap());
    }

    #[test]
    fn trivial_fds_vanish() {
        let f = set(&["A", "B"], &[(&["A", "B"], &["A"])]);
        assert!(minimal_cover(&f).is_empty());
    }

    #[test]
    fn projection_keeps_transitive_consequence() {
        // A -> B -> C projected onto {A, C} must keep A -> C
        let f = set(&["A", "B", "C"], &[(&["A"], &["B"]), (&["B"], &["C"])]);
        let p = project(&f, &attrs(["A", "C"])).unwrap();
        assert_eq!(p.fds(), &[Fd::new(["A"], ["C"])]);
        assert_eq!(p.universe(), &attrs(["A", "C"]));
    }

    #[test]
    fn projection_width_is_capped() {
        let names: Vec<String> = (0..21).map(|i| format!("c{i}")).collect();
        let f = FdSet::empty(attrs(names.clone())).unwrap();
        assert_eq!(project(&f, &attrs(names)), Err(FdError::ProjectionTooLarge(21)));
    }
}
