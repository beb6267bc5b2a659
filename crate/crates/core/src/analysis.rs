//! Single-pass statistics of one composition: components, gaps, runs,
//! extreme terms, squares and equal-term checks.
//!
//! Empty-case conventions: with no components `cmax = cmin = 0`, with no
//! gaps `gmax = gmin = 0`. This keeps predicates such as `cmax >= k`
//! total.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::composition::Composition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Component,
    Gap,
    EqualRun,
    IncreasingRun,
}

/// A maximal run: 1-based start and positive length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub start: usize,
    pub length: usize,
}

/// Disjoint, start-sorted, maximal runs of one kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: RunKind,
    pub runs: Vec<Run>,
}

impl RunReport {
    pub fn count(&self) -> usize {
        self.runs.len()
    }

    pub fn longest(&self) -> usize {
        self.runs.iter().map(|r| r.length).max().unwrap_or(0)
    }

    pub fn shortest(&self) -> usize {
        self.runs.iter().map(|r| r.length).min().unwrap_or(0)
    }

    pub fn total_length(&self) -> usize {
        self.runs.iter().map(|r| r.length).sum()
    }
}

/// Maximal runs of consecutive positions satisfying `pred`.
fn runs_where(terms: &[u64], kind: RunKind, pred: impl Fn(u64) -> bool) -> RunReport {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &t) in terms.iter().enumerate() {
        match (pred(t), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push(Run { start: s + 1, length: i - s });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(Run { start: s + 1, length: terms.len() - s });
    }
    RunReport { kind, runs }
}

/// Maximal runs of nonzero terms.
pub fn components(c: &Composition) -> RunReport {
    runs_where(c.terms(), RunKind::Component, |t| t != 0)
}

/// Maximal runs of zero terms.
pub fn gaps(c: &Composition) -> RunReport {
    runs_where(c.terms(), RunKind::Gap, |t| t == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremes {
    pub cmax: usize,
    pub cmin: usize,
    pub gmax: usize,
    pub gmin: usize,
    pub tmax: u64,
    pub tmin: u64,
}

/// Longest and shortest component and gap, largest and smallest term.
pub fn extremes(c: &Composition) -> Extremes {
    let terms = c.terms();
    let (mut cmax, mut cmin, mut gmax, mut gmin) = (0usize, usize::MAX, 0usize, usize::MAX);
    let mut run = 0usize;
    let mut run_is_zero = terms[0] == 0;
    let mut close = |len: usize, zero: bool| {
        if zero {
            gmax = gmax.max(len);
            gmin = gmin.min(len);
        } else {
            cmax = cmax.max(len);
            cmin = cmin.min(len);
        }
    };
    for &t in terms {
        if (t == 0) == run_is_zero {
            run += 1;
        } else {
            close(run, run_is_zero);
            run = 1;
            run_is_zero = t == 0;
        }
    }
    close(run, run_is_zero);
    Extremes {
        cmax,
        cmin: if cmin == usize::MAX { 0 } else { cmin },
        gmax,
        gmin: if gmin == usize::MAX { 0 } else { gmin },
        tmax: terms.iter().copied().max().unwrap_or(0),
        tmin: terms.iter().copied().min().unwrap_or(0),
    }
}

/// Maximal runs of equal terms. With `nonzero_only`, runs of zeros are
/// dropped.
pub fn equal_runs(c: &Composition, nonzero_only: bool) -> RunReport {
    let terms = c.terms();
    let mut runs = Vec::new();
    let mut s = 0;
    for i in 1..=terms.len() {
        if i == terms.len() || terms[i] != terms[s] {
            if !(nonzero_only && terms[s] == 0) {
                runs.push(Run { start: s + 1, length: i - s });
            }
            s = i;
        }
    }
    RunReport { kind: RunKind::EqualRun, runs }
}

/// Largest `k` such that `k` consecutive terms all equal `k`; 0 if none.
///
/// An equal run of value `v` and length `L` contains a `v`-square iff
/// `1 <= v <= L`.
pub fn largest_square(c: &Composition) -> u64 {
    let terms = c.terms();
    equal_runs(c, true)
        .runs
        .iter()
        .map(|r| (terms[r.start - 1], r.length as u64))
        .filter(|&(v, len)| v <= len)
        .map(|(v, _)| v)
        .max()
        .unwrap_or(0)
}

/// Occurrence counts of `k`-squares for every `k >= min_side`, counted by
/// start position (a run of value `v`, length `L >= v` holds `L - v + 1`).
pub fn square_counts(c: &Composition, min_side: u64) -> BTreeMap<u64, u64> {
    let terms = c.terms();
    let mut out = BTreeMap::new();
    for r in equal_runs(c, true).runs {
        let v = terms[r.start - 1];
        let len = r.length as u64;
        if v >= min_side.max(1) && v <= len {
            *out.entry(v).or_insert(0) += len - v + 1;
        }
    }
    out
}

/// Maximal strictly increasing runs of consecutive terms.
pub fn increasing_runs(c: &Composition) -> RunReport {
    let terms = c.terms();
    let mut runs = Vec::new();
    let mut s = 0;
    for i in 1..=terms.len() {
        if i == terms.len() || terms[i] <= terms[i - 1] {
            runs.push(Run { start: s + 1, length: i - s });
            s = i;
        }
    }
    RunReport { kind: RunKind::IncreasingRun, runs }
}

pub fn longest_increasing_run(c: &Composition) -> usize {
    let terms = c.terms();
    let (mut best, mut cur) = (1usize, 1usize);
    for w in terms.windows(2) {
        cur = if w[1] > w[0] { cur + 1 } else { 1 };
        best = best.max(cur);
    }
    best
}

/// No two adjacent terms are equal.
pub fn is_carlitz(c: &Composition) -> bool {
    c.terms().windows(2).all(|w| w[0] != w[1])
}

/// Largest number of times any single value occurs.
pub fn max_multiplicity(c: &Composition) -> usize {
    let mut counts: HashMap<u64, usize> = HashMap::with_capacity(c.len());
    let mut best = 0;
    for &t in c.terms() {
        let e = counts.entry(t).or_insert(0);
        *e += 1;
        best = best.max(*e);
    }
    best
}

/// Whether all terms are distinct; sorts a copy, which is cheaper than
/// hashing for the very large values seen when `q` is tiny.
pub fn all_distinct(c: &Composition) -> bool {
    let mut v = c.terms().to_vec();
    v.sort_unstable();
    v.windows(2).all(|w| w[0] != w[1])
}

/// Number of components whose length is at most `k`.
pub fn short_components(c: &Composition, k: usize) -> usize {
    components(c).runs.iter().filter(|r| r.length <= k).count()
}

/// Number of gaps whose length is at most `k`.
pub fn short_gaps(c: &Composition, k: usize) -> usize {
    gaps(c).runs.iter().filter(|r| r.length <= k).count()
}
