use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Compares identifiers so that embedded numbers order numerically
/// (`t2` < `t10`). Ties fall back to plain byte order, keeping the
/// ordering total and consistent with `Eq`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut xs, mut ys) = (a.as_bytes(), b.as_bytes());
    loop {
        match (xs.first(), ys.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let xl = xs.iter().take_while(|c| c.is_ascii_digit()).count();
                let yl = ys.iter().take_while(|c| c.is_ascii_digit()).count();
                let xd = trim_zeros(&xs[..xl]);
                let yd = trim_zeros(&ys[..yl]);
                let ord = xd.len().cmp(&yd.len()).then_with(|| xd.cmp(yd));
                if ord != Ordering::Equal {
                    return ord;
                }
                xs = &xs[xl..];
                ys = &ys[yl..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                xs = &xs[1..];
                ys = &ys[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let start = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[start..]
}

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                natural_cmp(&self.0, &other.0)
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

id_type!(
    /// Identifier of a relation (`tID`).
    TableId
);
id_type!(
    /// Identifier of an attribute (`aID`).
    AttrId
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_runs_compare_by_value() {
        assert_eq!(natural_cmp("t2", "t10"), Ordering::Less);
        assert_eq!(natural_cmp("a10", "a9"), Ordering::Greater);
        assert_eq!(natural_cmp("t1", "t1"), Ordering::Equal);
        assert_eq!(natural_cmp("a", "b"), Ordering::Less);
        assert_eq!(natural_cmp("t01", "t1"), Ordering::Less);
        assert_eq!(natural_cmp("t1x", "t1"), Ordering::Greater);
    }

    #[test]
    fn ids_sort_naturally() {
        let mut ids: Vec<TableId> = ["t10", "t2", "t1"].into_iter().map(TableId::from).collect();
        ids.sort();
        let names: Vec<&str> = ids.iter().map(TableId::as_str).collect();
        assert_eq!(names, ["t1", "t2", "t10"]);
    }
}
