//! Functional-dependency algebra.
//!
//! Attribute names are plain, table-scoped strings. Internally every FD set
//! is compiled to 64-bit masks over its (sorted) universe, so a universe is
//! limited to 64 attributes. Output ordering is deterministic: attribute sets
//! sort lexicographically by their sorted member names.

mod checks;
mod closure;
mod cover;
pub mod oracle;
mod problem;
mod synthesis;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use checks::{is_3nf, is_dependency_preserving, is_lossless, ThreeNfReport};
pub use closure::{candidate_keys, closure, equivalent, implies, is_superkey};
pub use cover::{minimal_cover, project};
pub use problem::{parse_fd_problem, ParseError};
pub use synthesis::{synthesize_3nf, synthesize_3nf_with_key, Decomposition, Fragment};

pub type AttrSet = BTreeSet<String>;

/// Largest universe the bitmask representation can hold.
pub const MAX_UNIVERSE: usize = 64;

/// Fragments wider than this are not projected (projection enumerates every
/// subset of the fragment).
pub const MAX_PROJECTION_WIDTH: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FdError {
    #[error("attribute `{0}` is not in the universe")]
    UnknownAttribute(String),
    #[error("functional dependency has an empty left-hand side")]
    EmptyLhs,
    #[error("functional dependency has an empty right-hand side")]
    EmptyRhs,
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("universe of {0} attributes exceeds the limit of {MAX_UNIVERSE}")]
    UniverseTooLarge(usize),
    #[error("decomposition does not cover the universe (missing {0:?})")]
    NotCovering(Vec<String>),
    #[error("cannot project onto {0} attributes (limit {MAX_PROJECTION_WIDTH})")]
    ProjectionTooLarge(usize),
    #[error("brute-force oracle is limited to 10 attributes, got {0}")]
    OracleTooLarge(usize),
}

/// Builds an [`AttrSet`] from anything string-like.
pub fn attrs<I, S>(names: I) -> AttrSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(Into::into).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fd {
    pub lhs: AttrSet,
    pub rhs: AttrSet,
}

impl Fd {
    pub fn new<I, J, S, T>(lhs: I, rhs: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        Self { lhs: attrs(lhs), rhs: attrs(rhs) }
    }

    pub fn is_trivial(&self) -> bool {
        self.rhs.is_subset(&self.lhs)
    }
}

impl fmt::Display for Fd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &AttrSet| s.iter().map(String::as_str).collect::<Vec<_>>().join(" ");
        write!(f, "{} -> {}", join(&self.lhs), join(&self.rhs))
    }
}

/// A set of FDs over a declared universe. FDs keep their input order
/// (exact duplicates dropped) since minimal-cover tie-breaking follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdSet {
    universe: AttrSet,
    fds: Vec<Fd>,
}

impl FdSet {
    pub fn new(universe: AttrSet, fds: impl IntoIterator<Item = Fd>) -> Result<Self, FdError> {
        if universe.len() > MAX_UNIVERSE {
            return Err(FdError::UniverseTooLarge(universe.len()));
        }
        let mut out: Vec<Fd> = Vec::new();
        for fd in fds {
            if fd.lhs.is_empty() {
                return Err(FdError::EmptyLhs);
            }
            if fd.rhs.is_empty() {
                return Err(FdError::EmptyRhs);
            }
            if let Some(a) = fd.lhs.iter().chain(&fd.rhs).find(|a| !universe.contains(*a)) {
                return Err(FdError::UnknownAttribute(a.clone()));
            }
            if !out.contains(&fd) {
                out.push(fd);
            }
        }
        Ok(Self { universe, fds: out })
    }

    /// An FD set with no dependencies.
    pub fn empty(universe: AttrSet) -> Result<Self, FdError> {
        Self::new(universe, [])
    }

    pub fn universe(&self) -> &AttrSet {
        &self.universe
    }

    pub fn fds(&self) -> &[Fd] {
        &self.fds
    }

    pub fn is_empty(&self) -> bool {
        self.fds.is_empty()
    }

    pub(crate) fn compile(&self) -> Compiled {
        let names: Vec<String> = self.universe.iter().cloned().collect();
        let mut c = Compiled { names, fds: Vec::with_capacity(self.fds.len()) };
        for fd in &self.fds {
            let lhs = c.mask_unchecked(&fd.lhs);
            let rhs = c.mask_unchecked(&fd.rhs);
            c.fds.push((lhs, rhs));
        }
        c
    }
}

impl fmt::Display for FdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let universe: Vec<&str> = self.universe.iter().map(String::as_str).collect();
        writeln!(f, "universe: {}", universe.join(" "))?;
        for fd in &self.fds {
            writeln!(f, "{fd}")?;
        }
        Ok(())
    }
}

pub(crate) type Bits = u64;

/// An FD set lowered to bitmasks over a sorted universe.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub names: Vec<String>,
    pub fds: Vec<(Bits, Bits)>,
}

impl Compiled {
    pub fn full(&self) -> Bits {
        match self.names.len() {
            0 => 0,
            64 => Bits::MAX,
            n => (1 << n) - 1,
        }
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn mask(&self, set: &AttrSet) -> Result<Bits, FdError> {
        set.iter().try_fold(0, |acc, a| {
            self.index(a).map(|i| acc | (1 << i)).ok_or_else(|| FdError::UnknownAttribute(a.clone()))
        })
    }

    fn mask_unchecked(&self, set: &AttrSet) -> Bits {
        set.iter().filter_map(|a| self.index(a)).fold(0, |acc, i| acc | (1 << i))
    }

    pub fn names_of(&self, bits: Bits) -> AttrSet {
        iter_bits(bits).map(|i| self.names[i].clone()).collect()
    }

    pub fn closure(&self, start: Bits) -> Bits {
        closure_bits(&self.fds, start)
    }

    pub fn fd(&self, lhs: Bits, rhs: Bits) -> Fd {
        Fd { lhs: self.names_of(lhs), rhs: self.names_of(rhs) }
    }
}

/// Least fixpoint of `start` under `fds`.
pub(crate) fn closure_bits(fds: &[(Bits, Bits)], start: Bits) -> Bits {
    let mut x = start;
    loop {
        let before = x;
        for &(lhs, rhs) in fds {
            if lhs & !x == 0 {
                x |= rhs;
            }
        }
        if x == before {
            return x;
        }
    }
}

pub(crate) fn iter_bits(bits: Bits) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| bits & (1 << i) != 0)
}

pub(crate) fn is_subset(a: Bits, b: Bits) -> bool {
    a & !b == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_universe_and_empty_sides() {
        let u = attrs(["A", "B"]);
        assert_eq!(FdSet::new(u.clone(), [Fd::new(["A"], ["Z"])]), Err(FdError::UnknownAttribute("Z".into())));
        assert_eq!(FdSet::new(u.clone(), [Fd::new(Vec::<String>::new(), ["A"])]), Err(FdError::EmptyLhs));
        assert_eq!(FdSet::new(u, [Fd::new(["A"], Vec::<String>::new())]), Err(FdError::EmptyRhs));
    }

    #[test]
    fn duplicates_collapse_in_input_order() {
        let f =
            FdSet::new(attrs(["A", "B", "C"]), [Fd::new(["B"], ["C"]), Fd::new(["A"], ["B"]), Fd::new(["B"], ["C"])])
                .unwrap();
        assert_eq!(f.fds(), &[Fd::new(["B"], ["C"]), Fd::new(["A"], ["B"])]);
    }

    #[test]
    fn display_round_trips_through_parser() {
        let f = FdSet::new(attrs(["A", "B", "C"]), [Fd::new(["A", "B"], ["C"])]).unwrap();
        assert_eq!(parse_fd_problem(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn full_mask_at_width_limit() {
        let names: Vec<String> = (0..64).map(|i| format!("c{i:02}")).collect();
        let f = FdSet::empty(attrs(names)).unwrap();
        assert_eq!(f.compile().full(), u64::MAX);
        let too_many: Vec<String> = (0..65).map(|i| format!("c{i:02}")).collect();
        assert_eq!(FdSet::empty(attrs(too_many)), Err(FdError::UniverseTooLarge(65)));
    }
}
