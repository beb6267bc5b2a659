use serde::{Deserialize, Serialize};

use super::{PatternKind, PatternSpec, Shape};
use crate::composition::Composition;
use crate::error::{Error, Result};

/// Longest nonconsecutive ordering pattern accepted.
pub const MAX_ORDERING_NONCONSECUTIVE: usize = 8;

/// Default budget of partial index tuples visited by the ordering search.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

/// Separation required between the end of one block and the start of the
/// next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMode {
    /// Blocks in order and disjoint; they may be adjacent.
    #[default]
    Loose,
    /// At least one free position between consecutive blocks.
    Strict,
}

impl GapMode {
    pub(crate) fn min_gap(self) -> usize {
        match self {
            GapMode::Loose => 0,
            GapMode::Strict => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOptions {
    pub gap: GapMode,
    /// How many anchor tuples to report; 0 reports none.
    pub max_positions: usize,
    /// Budget for the ordering search, in visited partial tuples.
    pub search_cap: u64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { gap: GapMode::Loose, max_positions: 0, search_cap: DEFAULT_SEARCH_CAP }
    }
}

impl MatchOptions {
    pub fn with_positions(max_positions: usize) -> Self {
        MatchOptions { max_positions, ..Self::default() }
    }
}

/// Result of matching one pattern against one composition.
///
/// `positions` holds 1-based anchors: window starts for consecutive
/// patterns, block starts for vincular ones and indices for nonconsecutive
/// ones. When `truncated` is set, `count` is only a lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub count: u64,
    pub exists: bool,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Vec<usize>>>,
}

/// Checks one contiguous block against a window of equal length.
#[derive(Clone, Debug)]
enum BlockMatcher {
    Exact(Vec<u64>),
    Upper(Vec<u64>),
    Lower(Vec<u64>),
    /// Pairs of offsets adjacent in the sorted pattern order, with `true`
    /// when the pattern values are equal.
    Ordering(Vec<(usize, usize, bool)>),
}

impl BlockMatcher {
    fn new(kind: PatternKind, terms: &[u64]) -> Self {
        match kind {
            PatternKind::Exact => BlockMatcher::Exact(terms.to_vec()),
            PatternKind::Upper => BlockMatcher::Upper(terms.to_vec()),
            PatternKind::Lower => BlockMatcher::Lower(terms.to_vec()),
            PatternKind::Ordering => {
                let mut idx: Vec<usize> = (0..terms.len()).collect();
                idx.sort_by_key(|&i| (terms[i], i));
                let chain = idx
                    .windows(2)
                    .map(|w| (w[0], w[1], terms[w[0]] == terms[w[1]]))
                    .collect();
                BlockMatcher::Ordering(chain)
            }
        }
    }

    #[inline]
    fn matches(&self, w: &[u64]) -> bool {
        match self {
            BlockMatcher::Exact(t) => w == t.as_slice(),
            BlockMatcher::Upper(t) => w.iter().zip(t).all(|(a, b)| a >= b),
            BlockMatcher::Lower(t) => w.iter().zip(t).all(|(a, b)| a <= b),
            BlockMatcher::Ordering(chain) => chain
                .iter()
                .all(|&(a, b, eq)| if eq { w[a] == w[b] } else { w[a] < w[b] }),
        }
    }
}

/// Dispatches on the pattern shape.
pub fn match_pattern(c: &Composition, spec: &PatternSpec, opts: &MatchOptions) -> Result<MatchReport> {
    match spec.shape() {
        Shape::Consecutive => match_consecutive(c, spec, opts),
        Shape::Nonconsecutive => match_nonconsecutive(c, spec, opts),
        Shape::Vincular => match_vincular(c, spec, opts),
    }
}

/// Counts windows matching a single-block pattern.
pub fn match_consecutive(c: &Composition, spec: &PatternSpec, opts: &MatchOptions) -> Result<MatchReport> {
    if spec.shape() != Shape::Consecutive {
        return Err(Error::param(format!("`{spec}` is not a consecutive pattern")));
    }
    let terms = c.terms();
    let block = &spec.blocks()[0];
    let matcher = BlockMatcher::new(spec.kind(), block);
    let mut count = 0u64;
    let mut positions = (opts.max_positions > 0).then(Vec::new);
    if block.len() <= terms.len() {
        for (i, w) in terms.windows(block.len()).enumerate() {
            if matcher.matches(w) {
                count += 1;
                if let Some(pos) = positions.as_mut() {
                    if pos.len() < opts.max_positions {
                        pos.push(vec![i + 1]);
                    }
                }
            }
        }
    }
    Ok(MatchReport { count, exists: count > 0, truncated: false, positions })
}

/// Counts tuples of block anchors for exact, upper or lower patterns with
/// any block structure.
pub fn match_vincular(c: &Composition, spec: &PatternSpec, opts: &MatchOptions) -> Result<MatchReport> {
    if spec.kind() == PatternKind::Ordering {
        return match spec.shape() {
            Shape::Consecutive => match_consecutive(c, spec, opts),
            Shape::Nonconsecutive => match_nonconsecutive(c, spec, opts),
            Shape::Vincular => Err(Error::Unsupported(format!(
                "ordering pattern `{spec}` with multi-term blocks"
            ))),
        };
    }
    Ok(BlockTable::build(c.terms(), spec, opts.gap).report(opts.max_positions))
}

/// Counts index tuples matching an all-singleton pattern.
pub fn match_nonconsecutive(c: &Composition, spec: &PatternSpec, opts: &MatchOptions) -> Result<MatchReport> {
    if spec.blocks().iter().any(|b| b.len() != 1) {
        return Err(Error::param(format!("`{spec}` is not a nonconsecutive pattern")));
    }
    if spec.kind() != PatternKind::Ordering {
        return Ok(BlockTable::build(c.terms(), spec, opts.gap).report(opts.max_positions));
    }
    let k = spec.length();
    if k > MAX_ORDERING_NONCONSECUTIVE {
        return Err(Error::Unsupported(format!(
            "nonconsecutive ordering pattern of length {k} exceeds {MAX_ORDERING_NONCONSECUTIVE}"
        )));
    }
    let terms = c.terms();
    let pattern = spec.terms();
    if spec.max_term() == 0 && opts.gap == GapMode::Loose && opts.max_positions == 0 {
        let count = equal_value_tuples(terms, k);
        return Ok(MatchReport {
            count: count.min(u64::MAX as u128) as u64,
            exists: count > 0,
            truncated: count > u64::MAX as u128,
            positions: None,
        });
    }
    let mut search = OrderSearch::new(terms, &pattern, opts, false);
    search.run();
    Ok(search.into_report())
}

/// Whether the pattern occurs at all. Cheaper than counting: greedy
/// leftmost placement for exact, upper and lower patterns, early exit for
/// ordering patterns.
pub fn contains(c: &Composition, spec: &PatternSpec, gap: GapMode) -> Result<bool> {
    contains_terms(c.terms(), spec, gap)
}

pub(crate) fn contains_terms(terms: &[u64], spec: &PatternSpec, gap: GapMode) -> Result<bool> {
    match (spec.kind(), spec.shape()) {
        (PatternKind::Ordering, Shape::Vincular) => {
            Err(Error::Unsupported(format!("ordering pattern `{spec}` with multi-term blocks")))
        }
        (PatternKind::Ordering, Shape::Nonconsecutive) => {
            let k = spec.length();
            if k > MAX_ORDERING_NONCONSECUTIVE {
                return Err(Error::Unsupported(format!(
                    "nonconsecutive ordering pattern of length {k} exceeds {MAX_ORDERING_NONCONSECUTIVE}"
                )));
            }
            if spec.max_term() == 0 && gap == GapMode::Loose {
                return Ok(equal_value_tuples(terms, k) > 0);
            }
            let opts = MatchOptions { gap, ..MatchOptions::default() };
            let pattern = spec.terms();
            let mut search = OrderSearch::new(terms, &pattern, &opts, true);
            search.run();
            Ok(search.count > 0)
        }
        (PatternKind::Ordering, Shape::Consecutive) => {
            let block = &spec.blocks()[0];
            let m = BlockMatcher::new(PatternKind::Ordering, block);
            Ok(block.len() <= terms.len() && terms.windows(block.len()).any(|w| m.matches(w)))
        }
        (kind, _) => {
            let g = gap.min_gap();
            let mut pos = 0usize;
            for block in spec.blocks() {
                let m = BlockMatcher::new(kind, block);
                let len = block.len();
                let mut found = None;
                let mut a = pos;
                while a + len <= terms.len() {
                    if m.matches(&terms[a..a + len]) {
                        found = Some(a);
                        break;
                    }
                    a += 1;
                }
                match found {
                    Some(a) => pos = a + len + g,
                    None => return Ok(false),
                }
            }
            Ok(true)
        }
    }
}

/// Number of occurrences with default options; errors as [`match_pattern`].
pub fn count_occurrences(c: &Composition, spec: &PatternSpec, gap: GapMode) -> Result<MatchReport> {
    let opts = MatchOptions { gap, ..MatchOptions::default() };
    match_pattern(c, spec, &opts)
}

/// `sum_v binom(count_v, k)`: tuples of `k` positions holding equal values.
fn equal_value_tuples(terms: &[u64], k: usize) -> u128 {
    let mut sorted = terms.to_vec();
    sorted.sort_unstable();
    let mut total = 0u128;
    for group in sorted.chunk_by(|a, b| a == b) {
        total = total.saturating_add(small_binomial(group.len() as u128, k as u128));
    }
    total
}

fn small_binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Per-block anchor tables for exact, upper and lower patterns.
struct BlockTable {
    lens: Vec<usize>,
    gap: usize,
    /// `hits[j][a]`: block `j` matches at anchor `a` (0-based).
    hits: Vec<Vec<bool>>,
}

impl BlockTable {
    fn build(terms: &[u64], spec: &PatternSpec, gap: GapMode) -> Self {
        let n = terms.len();
        let hits = spec
            .blocks()
            .iter()
            .map(|block| {
                let m = BlockMatcher::new(spec.kind(), block);
                if block.len() > n {
                    Vec::new()
                } else {
                    terms.windows(block.len()).map(|w| m.matches(w)).collect()
                }
            })
            .collect();
        BlockTable { lens: spec.block_lengths(), gap: gap.min_gap(), hits }
    }

    /// Exact count by a prefix-sum recurrence over blocks, saturating at
    /// `u128::MAX`.
    fn count(&self) -> u128 {
        let mut prev: Vec<u128> = self.hits[0].iter().map(|&h| h as u128).collect();
        for j in 1..self.hits.len() {
            let shift = self.lens[j - 1] + self.gap;
            let mut prefix = 0u128;
            let mut cur = vec![0u128; self.hits[j].len()];
            for (a, slot) in cur.iter_mut().enumerate() {
                if a >= shift {
                    if let Some(&v) = prev.get(a - shift) {
                        prefix = prefix.saturating_add(v);
                    }
                }
                if self.hits[j][a] {
                    *slot = prefix;
                }
            }
            prev = cur;
        }
        prev.into_iter().fold(0u128, |acc, v| acc.saturating_add(v))
    }

    /// `viable[j][a]`: block `j` at anchor `a` extends to a full match.
    fn viable(&self) -> Vec<Vec<bool>> {
        let b = self.hits.len();
        let mut viable: Vec<Vec<bool>> = vec![Vec::new(); b];
        viable[b - 1] = self.hits[b - 1].clone();
        for j in (0..b - 1).rev() {
            let next = &viable[j + 1];
            let mut suffix_any = vec![false; next.len() + 1];
            for a in (0..next.len()).rev() {
                suffix_any[a] = next[a] || suffix_any[a + 1];
            }
            let shift = self.lens[j] + self.gap;
            viable[j] = self.hits[j]
                .iter()
                .enumerate()
                .map(|(a, &h)| h && suffix_any.get(a + shift).copied().unwrap_or(false))
                .collect();
        }
        viable
    }

    fn positions(&self, limit: usize) -> Vec<Vec<usize>> {
        let viable = self.viable();
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(viable.len());
        self.collect(&viable, 0, 0, &mut stack, &mut out, limit);
        out
    }

    fn collect(
        &self,
        viable: &[Vec<bool>],
        j: usize,
        from: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        for a in from..viable[j].len() {
            if out.len() >= limit {
                return;
            }
            if !viable[j][a] {
                continue;
            }
            stack.push(a + 1);
            if j + 1 == viable.len() {
                out.push(stack.clone());
            } else {
                self.collect(viable, j + 1, a + self.lens[j] + self.gap, stack, out, limit);
            }
            stack.pop();
        }
    }

    fn report(&self, max_positions: usize) -> MatchReport {
        let count = self.count();
        MatchReport {
            count: count.min(u64::MAX as u128) as u64,
            exists: count > 0,
            truncated: count > u64::MAX as u128,
            positions: (max_positions > 0).then(|| self.positions(max_positions)),
        }
    }
}

/// Depth-first search over increasing index tuples for nonconsecutive
/// ordering patterns.
struct OrderSearch<'a> {
    terms: &'a [u64],
    pattern: &'a [u64],
    gap: usize,
    cap: u64,
    stop_at_first: bool,
    max_positions: usize,
    visited: u64,
    count: u64,
    truncated: bool,
    chosen: Vec<usize>,
    positions: Vec<Vec<usize>>,
}

impl<'a> OrderSearch<'a> {
    fn new(terms: &'a [u64], pattern: &'a [u64], opts: &MatchOptions, stop_at_first: bool) -> Self {
        OrderSearch {
            terms,
            pattern,
            gap: opts.gap.min_gap(),
            cap: opts.search_cap,
            stop_at_first,
            max_positions: opts.max_positions,
            visited: 0,
            count: 0,
            truncated: false,
            chosen: Vec::with_capacity(pattern.len()),
            positions: Vec::new(),
        }
    }

    fn run(&mut self) {
        self.descend(0);
    }

    fn done(&self) -> bool {
        self.truncated || (self.stop_at_first && self.count > 0)
    }

    fn descend(&mut self, from: usize) {
        let t = self.chosen.len();
        let k = self.pattern.len();
        let n = self.terms.len();
        // Each later term needs its own index plus the gap.
        let reserve = (k - t - 1) * (1 + self.gap);
        if n < reserve + 1 {
            return;
        }
        let last = n - 1 - reserve;
        if from > last {
            return;
        }
        for i in from..=last {
            if self.done() {
                return;
            }
            self.visited += 1;
            if self.visited > self.cap {
                self.truncated = true;
                return;
            }
            let v = self.terms[i];
            let pv = self.pattern[t];
            let consistent = self.chosen.iter().enumerate().all(|(s, &j)| {
                let (u, pu) = (self.terms[j], self.pattern[s]);
                u.cmp(&v) == pu.cmp(&pv)
            });
            if !consistent {
                continue;
            }
            self.chosen.push(i);
            if t + 1 == k {
                self.count += 1;
                if self.positions.len() < self.max_positions {
                    self.positions.push(self.chosen.iter().map(|&j| j + 1).collect());
                }
            } else {
                self.descend(i + 1 + self.gap);
            }
            self.chosen.pop();
        }
    }

    fn into_report(self) -> MatchReport {
        MatchReport {
            count: self.count,
            exists: self.count > 0,
            truncated: self.truncated,
            positions: (self.max_positions > 0).then_some(self.positions),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures::{figure1, figure2};
    use crate::patterns::parse_pattern;

    fn comp(s: &str) -> Composition {
        Composition::parse(s).unwrap()
    }

    fn count(c: &Composition, p: &str) -> u64 {
        match_pattern(c, &parse_pattern(p).unwrap(), &MatchOptions::default()).unwrap().count
    }

    fn exists_with(c: &Composition, p: &str, gap: GapMode) -> bool {
        let opts = MatchOptions { gap, ..MatchOptions::default() };
        let r = match_pattern(c, &parse_pattern(p).unwrap(), &opts).unwrap();
        assert_eq!(r.exists, contains(c, &parse_pattern(p).unwrap(), gap).unwrap());
        r.exists
    }

    #[test]
    fn figure_counts() {
        assert_eq!(count(&figure2(), "e:[2,0,2]"), 4);
        assert_eq!(count(&figure2(), "e:[0,2,0,3,1,0,2,0]"), 3);
        let r = match_pattern(&figure1(), &parse_pattern("o:[0,2,1,1]").unwrap(), &MatchOptions::with_positions(10))
            .unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.positions, Some(vec![vec![34]]));
        assert_eq!(&figure1().terms()[33..37], &[1, 6, 3, 3]);
    }

    #[test]
    fn windows_overlap() {
        assert_eq!(count(&comp("00000"), "e:[0,0]"), 4);
        assert_eq!(count(&comp("222"), "e:[2,2]"), 2);
        assert_eq!(count(&comp("000"), "o:[0,0,0]"), 1);
        assert_eq!(count(&comp("0"), "e:[0,0]"), 0);
    }

    #[test]
    fn vincular_gap_modes() {
        assert!(exists_with(&comp("1293"), "e:[1,2],3", GapMode::Strict));
        assert!(exists_with(&comp("1293"), "e:[1,2],3", GapMode::Loose));
        assert!(!exists_with(&comp("123"), "e:[1,2],3", GapMode::Strict));
        assert!(exists_with(&comp("123"), "e:[1,2],3", GapMode::Loose));
        assert_eq!(count(&comp("00"), "e:0,0"), 1);
        assert_eq!(count(&comp("0000"), "e:0,0"), 6);
        assert_eq!(count(&comp("0000"), "e:[0,0],0"), 3);
    }

    #[test]
    fn nonconsecutive() {
        assert!(exists_with(&comp("0509"), "e:5,9", GapMode::Loose));
        assert!(!exists_with(&comp("3120"), "o:1,0,2", GapMode::Loose));
        assert!(exists_with(&comp("3102"), "o:1,0,2", GapMode::Loose));
        assert_eq!(count(&comp("0101"), "o:0,0"), 2);
        assert_eq!(count(&comp("1111"), "o:0,0,0"), 4);
        assert!(exists_with(&comp("4242"), "l:3,3", GapMode::Loose));
        assert!(!exists_with(&comp("4242"), "l:1,3,1", GapMode::Loose));
    }

    #[test]
    fn ordering_vincular_rejected() {
        let spec = parse_pattern("o:[0,1],0").unwrap();
        let err = match_pattern(&comp("0101"), &spec, &MatchOptions::default()).unwrap_err();
        assert!(err.is_unsupported());
        let long = parse_pattern("o:0,1,2,3,4,5,6,7,8").unwrap();
        assert!(match_pattern(&comp("0101"), &long, &MatchOptions::default()).unwrap_err().is_unsupported());
    }

    #[test]
    fn search_cap_truncates() {
        let c = Composition::zeros(60).unwrap();
        let spec = parse_pattern("o:0,0,0,0").unwrap();
        let opts = MatchOptions { search_cap: 1000, max_positions: 1, ..MatchOptions::default() };
        let r = match_pattern(&c, &spec, &opts).unwrap();
        assert!(r.truncated && r.exists);
        let full = match_pattern(&c, &spec, &MatchOptions::default()).unwrap();
        assert_eq!(full.count, 487_635);
    }

    #[test]
    fn vincular_positions_listed_in_order() {
        let spec = parse_pattern("e:[0,0],1").unwrap();
        let r = match_pattern(&comp("000101"), &spec, &MatchOptions::with_positions(10)).unwrap();
        assert_eq!(r.count, 4);
        assert_eq!(r.positions.unwrap(), vec![vec![1, 4], vec![1, 6], vec![2, 4], vec![2, 6]]);
    }
}
