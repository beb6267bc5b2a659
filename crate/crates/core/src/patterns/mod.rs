//! Pattern DSL and matchers.
//!
//! Grammar (no whitespace):
//!
//! ```text
//! pattern := kind ':' seq
//! kind    := 'e' | 'u' | 'l' | 'o'
//! seq     := element (',' element)*
//! element := term | '[' term (',' term)* ']'
//! term    := decimal nonnegative integer
//! ```
//!
//! A bracketed group is one block whose terms must be adjacent; a bare term
//! is a block of length one. One block is a consecutive pattern, two or
//! more blocks of length one a nonconsecutive pattern, anything else a
//! vincular pattern.

mod matching;
mod parse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matching::{
    contains, count_occurrences, match_consecutive, match_nonconsecutive, match_pattern,
    match_vincular, GapMode, MatchOptions, MatchReport, DEFAULT_SEARCH_CAP, MAX_ORDERING_NONCONSECUTIVE,
};
pub use parse::parse_pattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    /// Terms equal the pattern terms.
    Exact,
    /// Terms are at least the pattern terms.
    Upper,
    /// Terms are at most the pattern terms.
    Lower,
    /// Terms have the same relative order, equalities included.
    Ordering,
}

impl PatternKind {
    pub fn prefix(self) -> char {
        match self {
            PatternKind::Exact => 'e',
            PatternKind::Upper => 'u',
            PatternKind::Lower => 'l',
            PatternKind::Ordering => 'o',
        }
    }

    pub fn from_prefix(c: char) -> Option<Self> {
        Some(match c {
            'e' => PatternKind::Exact,
            'u' => PatternKind::Upper,
            'l' => PatternKind::Lower,
            'o' => PatternKind::Ordering,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Consecutive,
    Vincular,
    Nonconsecutive,
}

/// A validated pattern: a kind plus a nonempty list of nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternSpec {
    kind: PatternKind,
    blocks: Vec<Vec<u64>>,
}

impl PatternSpec {
    pub fn new(kind: PatternKind, blocks: Vec<Vec<u64>>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(Vec::is_empty) {
            return Err(Error::EmptyPattern);
        }
        let spec = PatternSpec { kind, blocks };
        if kind == PatternKind::Ordering && !is_initial_segment(&spec.terms()) {
            return Err(Error::OrderingAlphabet(spec.terms()));
        }
        Ok(spec)
    }

    /// Single-block pattern.
    pub fn consecutive(kind: PatternKind, terms: Vec<u64>) -> Result<Self> {
        Self::new(kind, vec![terms])
    }

    /// All-singleton pattern.
    pub fn nonconsecutive(kind: PatternKind, terms: Vec<u64>) -> Result<Self> {
        Self::new(kind, terms.into_iter().map(|t| vec![t]).collect())
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    /// All terms, blocks concatenated.
    pub fn terms(&self) -> Vec<u64> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Number of terms `k`.
    pub fn length(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Sum of the terms (not the length).
    pub fn size(&self) -> u64 {
        self.blocks.iter().flatten().sum()
    }

    pub fn block_lengths(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block_sizes(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.iter().sum()).collect()
    }

    pub fn shape(&self) -> Shape {
        if self.blocks.len() == 1 {
            Shape::Consecutive
        } else if self.blocks.iter().all(|b| b.len() == 1) {
            Shape::Nonconsecutive
        } else {
            Shape::Vincular
        }
    }

    pub fn is_nonzero(&self) -> bool {
        self.blocks.iter().flatten().any(|&t| t > 0)
    }

    /// Largest term `r`.
    pub fn max_term(&self) -> u64 {
        self.blocks.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Multiplicities `l_0, ..., l_r` of the values of an ordering pattern.
    pub fn value_multiplicities(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.max_term() as usize + 1];
        for &t in self.blocks.iter().flatten() {
            counts[t as usize] += 1;
        }
        counts
    }

    /// Canonical DSL text; parses back to an equal spec.
    pub fn to_dsl(&self) -> String {
        let mut s = String::new();
        s.push(self.kind.prefix());
        s.push(':');
        let bracket_all = self.blocks.len() == 1;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let body = block.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            if bracket_all || block.len() > 1 {
                s.push('[');
                s.push_str(&body);
                s.push(']');
            } else {
                s.push_str(&body);
            }
        }
        s
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

impl FromStr for PatternSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_pattern(s)
    }
}

impl Serialize for PatternSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_dsl())
    }
}

impl<'de> Deserialize<'de> for PatternSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_pattern(&text).map_err(serde::de::Error::custom)
    }
}

/// The distinct values are exactly `{0, 1, ..., r}`.
fn is_initial_segment(terms: &[u64]) -> bool {
    let max = terms.iter().copied().max().unwrap_or(0);
    if max as usize >= terms.len() {
        return false;
    }
    let mut seen = vec![false; max as usize + 1];
    for &t in terms {
        seen[t as usize] = true;
    }
    seen.into_iter().all(|b| b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let p = parse_pattern("e:[2,0,2]").unwrap();
        assert_eq!((p.shape(), p.length(), p.size()), (Shape::Consecutive, 3, 4));

        let v = parse_pattern("e:[1,2],0,4,[0,0,3]").unwrap();
        assert_eq!(v.shape(), Shape::Vincular);
        assert_eq!(v.block_lengths(), vec![2, 1, 1, 3]);
        assert_eq!(v.block_sizes(), vec![3, 0, 4, 3]);

        assert_eq!(parse_pattern("e:5,9").unwrap().shape(), Shape::Nonconsecutive);
        assert_eq!(parse_pattern("e:[5],[9]").unwrap().shape(), Shape::Nonconsecutive);
        assert_eq!(parse_pattern("u:3").unwrap().shape(), Shape::Consecutive);
    }

    #[test]
    fn ordering_alphabet() {
        assert!(matches!(parse_pattern("o:[0,3,2,2]"), Err(Error::OrderingAlphabet(_))));
        assert!(matches!(parse_pattern("o:[1,3,2,2]"), Err(Error::OrderingAlphabet(_))));
        assert!(parse_pattern("o:[0,2,1,1]").is_ok());
        assert!(parse_pattern("o:0,0").is_ok());
    }

    #[test]
    fn canonical_text_round_trips() {
        for text in ["e:[2,0,2]", "e:[1,2],0,4,[0,0,3]", "o:1,0,2", "l:[7]", "u:[1,1],[2,3]"] {
            let p = parse_pattern(text).unwrap();
            assert_eq!(parse_pattern(&p.to_dsl()).unwrap(), p);
        }
        assert_eq!(parse_pattern("e:5").unwrap().to_dsl(), "e:[5]");
    }
}
