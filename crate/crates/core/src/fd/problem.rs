//! Plain-text FD problem format:
//!
//! ```text
//! # comment
//! universe: A B C D
//! A -> B
//! B, D -> C
//! ```
//!
//! Attribute names are separated by whitespace or commas. The universe line
//! must come before any dependency.

use thiserror::Error;

use super::{attrs, AttrSet, Fd, FdSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn names(s: &str) -> AttrSet {
    attrs(s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()))
}

pub fn parse_fd_problem(text: &str) -> Result<FdSet, ParseError> {
    let mut universe: Option<AttrSet> = None;
    let mut fds = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("universe:") {
            if universe.is_some() {
                return Err(err(line, "duplicate universe declaration"));
            }
            let u = names(rest);
            if u.is_empty() {
                return Err(err(line, "universe is empty"));
            }
            universe = Some(u);
            continue;
        }
        let Some(u) = universe.as_ref() else {
            return Err(err(line, "dependency before `universe:` line"));
        };
        let Some((lhs, rhs)) = content.split_once("->") else {
            return Err(err(line, format!("expected `lhs -> rhs`, found `{content}`")));
        };
        let (lhs, rhs) = (names(lhs), names(rhs));
        if lhs.is_empty() {
            return Err(err(line, "empty left-hand side"));
        }
        if rhs.is_empty() {
            return Err(err(line, "empty right-hand side"));
        }
        if let Some(a) = lhs.iter().chain(&rhs).find(|a| !u.contains(*a)) {
            return Err(err(line, format!("unknown attribute `{a}`")));
        }
        fds.push(Fd { lhs, rhs });
    }
    let universe = universe.ok_or_else(|| err(text.lines().count().max(1), "missing `universe:` line"))?;
    FdSet::new(universe, fds).map_err(|e| err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_commas_and_blank_lines() {
        let f = parse_fd_problem("# chain\nuniverse: A, B C\n\nA -> B  # first\nB->C\n").unwrap();
        assert_eq!(f.universe(), &attrs(["A", "B", "C"]));
        assert_eq!(f.fds(), &[Fd::new(["A"], ["B"]), Fd::new(["B"], ["C"])]);
    }

    #[test]
    fn empty_fd_list_is_fine() {
        let f = parse_fd_problem("universe: A B\n").unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn unknown_attribute_reports_line() {
        let e = parse_fd_problem("universe: A B\nA -> B\nA -> Z\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("unknown attribute `Z`"));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_fd_problem("A -> B").unwrap_err().line, 1);
        assert_eq!(parse_fd_problem("universe: A\nA B").unwrap_err().line, 2);
        assert_eq!(parse_fd_problem("universe: A\n -> A").unwrap_err().message, "empty left-hand side");
        assert!(parse_fd_problem("").unwrap_err().message.contains("missing"));
        assert_eq!(parse_fd_problem("universe: A\nuniverse: B").unwrap_err().line, 2);
    }
}
