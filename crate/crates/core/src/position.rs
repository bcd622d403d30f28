//! Positions in a term and the prefix order on them.
//!
//! A position is a sequence of 1-based child indices; the empty sequence is
//! the root `ε`. Ordering follows the convention used throughout the crate:
//! `p` is *below* `q` when `q` is a prefix of `p`, which makes the root the
//! top element and the greatest common prefix the join.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// A path from the root of a term to one of its subterms.
///
/// The derived `Ord` is the lexicographic order on index sequences, where a
/// prefix sorts before its extensions (`1 < 1.2 < 2`). This is the order used
/// for label selection and canonical goal ordering; it is unrelated to the
/// prefix order exposed by [`Position::is_below`].
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<u32>);

impl Position {
    pub const fn root() -> Position {
        Position(Vec::new())
    }

    /// Builds a position from raw indices. Returns `None` if any index is 0.
    pub fn new(indices: Vec<u32>) -> Option<Position> {
        if indices.contains(&0) {
            None
        } else {
            Some(Position(indices))
        }
    }

    /// Panicking variant of [`Position::new`], handy for literals in tests.
    pub fn from_slice(indices: &[u32]) -> Position {
        Position::new(indices.to_vec()).expect("position indices are 1-based")
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self.i`
    pub fn child(&self, i: u32) -> Position {
        debug_assert!(i >= 1);
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(i);
        Position(v)
    }

    /// `self.other`
    pub fn concat(&self, other: &Position) -> Position {
        if other.is_root() {
            return self.clone();
        }
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Position(v)
    }

    /// True iff `prefix` is a prefix of `self`, i.e. `self ≤ prefix`.
    pub fn is_below(&self, prefix: &Position) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn is_strictly_below(&self, prefix: &Position) -> bool {
        self.0.len() > prefix.0.len() && self.is_below(prefix)
    }

    pub fn comparable(&self, other: &Position) -> bool {
        self.is_below(other) || other.is_below(self)
    }

    /// Removes `prefix` from the front, returning the remainder `q` with
    /// `self = prefix.q`.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|rest| Position(rest.to_vec()))
    }

    /// The join `self ∨ other`: their longest common prefix.
    pub fn join(&self, other: &Position) -> Position {
        let n = self
            .0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count();
        Position(self.0[..n].to_vec())
    }

    /// All suffixes `q` with `self = r.q` for some `r`, longest first. Always
    /// ends with the root.
    pub fn suffixes(&self) -> impl Iterator<Item = Position> + '_ {
        (0..=self.0.len()).map(move |k| Position(self.0[k..].to_vec()))
    }
}

/// Free-function form of [`Position::is_below`]: `p ≤ q` iff `q` is a prefix
/// of `p`.
pub fn prefix_leq(p: &Position, q: &Position) -> bool {
    p.is_below(q)
}

/// Greatest common prefix of a non-empty collection of positions.
///
/// Returns `None` for an empty input, which has no join.
pub fn gcp<'a, I>(positions: I) -> Option<Position>
where
    I: IntoIterator<Item = &'a Position>,
{
    let mut iter = positions.into_iter();
    let first = iter.next()?;
    let mut len = first.0.len();
    for p in iter {
        len = len.min(
            first.0[..len]
                .iter()
                .zip(&p.0)
                .take_while(|(a, b)| a == b)
                .count(),
        );
        if len == 0 {
            break;
        }
    }
    Some(Position(first.0[..len].to_vec()))
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Position {
    type Err = ParseError;

    /// Accepts `ε`, `eps`, the empty string, or dot-separated positive integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "eps" {
            return Ok(Position::root());
        }
        let mut v = Vec::new();
        let mut offset = 0;
        for part in s.split('.') {
            match part.parse::<u32>() {
                Ok(i) if i >= 1 => v.push(i),
                _ => {
                    return Err(ParseError::Syntax {
                        offset,
                        message: format!("invalid position index {part:?}"),
                    })
                }
            }
            offset += part.len() + 1;
        }
        Ok(Position(v))
    }
}
