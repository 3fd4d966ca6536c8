use super::{is_subset, iter_bits, AttrSet, Bits, Compiled, Fd, FdError, FdSet};

/// Attribute closure `attrs⁺` under `f`.
pub fn closure(attrs: &AttrSet, f: &FdSet) -> Result<AttrSet, FdError> {
    let c = f.compile();
    let start = c.mask(attrs)?;
    Ok(c.names_of(c.closure(start)))
}

/// Whether `g` follows from `f`: `g.rhs ⊆ closure(g.lhs)`.
pub fn implies(f: &FdSet, g: &Fd) -> Result<bool, FdError> {
    let c = f.compile();
    let lhs = c.mask(&g.lhs)?;
    let rhs = c.mask(&g.rhs)?;
    Ok(is_subset(rhs, c.closure(lhs)))
}

/// Mutual implication over the same universe.
pub fn equivalent(f: &FdSet, g: &FdSet) -> Result<bool, FdError> {
    for fd in g.fds() {
        if !implies(f, fd)? {
            return Ok(false);
        }
    }
    for fd in f.fds() {
        if !implies(g, fd)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_superkey(attrs: &AttrSet, f: &FdSet) -> Result<bool, FdError> {
    let c = f.compile();
    Ok(c.closure(c.mask(attrs)?) == c.full())
}

/// All candidate keys of `f.universe()`, sorted.
///
/// Uses the Lucchesi-Osborn enumeration: starting from one minimized key,
/// every FD `X -> Y` applied to a known key `K` yields the superkey
/// `X ∪ (K − Y)`; if it contains no known key it is minimized into a new one.
/// This finds every key with work polynomial in the number of keys.
pub fn candidate_keys(f: &FdSet) -> Result<Vec<AttrSet>, FdError> {
    if f.universe().is_empty() {
        return Err(FdError::EmptyUniverse);
    }
    let c = f.compile();
    let mut keys: Vec<AttrSet> = candidate_key_bits(&c).into_iter().map(|k| c.names_of(k)).collect();
    keys.sort();
    Ok(keys)
}

pub(crate) fn candidate_key_bits(c: &Compiled) -> Vec<Bits> {
    let full = c.full();
    let mut keys = vec![minimize_key(c, full)];
    let mut i = 0;
    while i < keys.len() {
        let key = keys[i];
        for &(lhs, rhs) in &c.fds {
            let candidate = lhs | (key & !rhs);
            if !keys.iter().any(|&k| is_subset(k, candidate)) {
                keys.push(minimize_key(c, candidate));
            }
        }
        i += 1;
    }
    keys
}

/// Drops attributes from a superkey while it stays a superkey.
pub(crate) fn minimize_key(c: &Compiled, superkey: Bits) -> Bits {
    let full = c.full();
    let mut key = superkey;
    for i in iter_bits(superkey) {
        let without = key & !(1 << i);
        if c.closure(without) == full {
            key = without;
        }
    }
    key
}
