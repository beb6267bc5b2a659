//! Deliberately naive reference implementations shared by the integration
//! tests. Nothing here calls into the library's matchers or statistics.
#![allow(dead_code)]

use std::collections::BTreeMap;

use randcomp::patterns::{GapMode, PatternKind, PatternSpec};

/// Every `n`-composition of `m`, generated recursively.
pub fn all_compositions(n: usize, m: u64) -> Vec<Vec<u64>> {
    fn rec(n: usize, m: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 1 {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=m {
            prefix.push(first);
            rec(n - 1, m - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(a: u64, b: u64) -> u128 {
    let b = b.min(a - b);
    (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
}

fn fits(kind: PatternKind, r: u64, v: u64) -> bool {
    match kind {
        PatternKind::Exact => v == r,
        PatternKind::Upper => v >= r,
        PatternKind::Lower => v <= r,
        PatternKind::Ordering => true,
    }
}

/// Number of index tuples `i_1 < ... < i_k` matching `spec`, by trying
/// every increasing tuple and then checking adjacency and values.
pub fn naive_count(terms: &[u64], spec: &PatternSpec, gap: GapMode) -> u64 {
    let blocks = spec.blocks();
    let pattern: Vec<u64> = blocks.iter().flatten().copied().collect();
    let k = pattern.len();
    let min_gap = if gap == GapMode::Strict { 1 } else { 0 };
    let mut block_of = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(block.len()));
    }
    let n = terms.len();
    if k > n {
        return 0;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0;
    loop {
        let mut ok = true;
        for j in 1..k {
            let step = idx[j] - idx[j - 1];
            if block_of[j] == block_of[j - 1] {
                ok &= step == 1;
            } else {
                ok &= step >= 1 + min_gap;
            }
        }
        if ok {
            let vals: Vec<u64> = idx.iter().map(|&i| terms[i]).collect();
            ok = if spec.kind() == PatternKind::Ordering {
                (0..k).all(|a| (0..k).all(|b| vals[a].cmp(&vals[b]) == pattern[a].cmp(&pattern[b])))
            } else {
                vals.iter().zip(&pattern).all(|(&v, &r)| fits(spec.kind(), r, v))
            };
        }
        count += ok as u64;
        // Next combination in lexicographic order.
        let mut j = k;
        loop {
            if j == 0 {
                return count;
            }
            j -= 1;
            if idx[j] < n - k + j {
                idx[j] += 1;
                for t in j + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Maximal runs of positions satisfying `pred`, as lengths.
pub fn naive_runs(terms: &[u64], pred: impl Fn(u64) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = 0;
    for &t in terms {
        if pred(t) {
            cur += 1;
        } else if cur > 0 {
            out.push(cur);
            cur = 0;
        }
    }
    if cur > 0 {
        out.push(cur);
    }
    out
}

#[derive(Debug, PartialEq, Eq)]
pub struct NaiveStats {
    pub components: usize,
    pub gaps: usize,
    pub cmax: usize,
    pub cmin: usize,
    pub gmax: usize,
    pub gmin: usize,
    pub tmax: u64,
    pub tmin: u64,
    pub largest_square: u64,
    pub square_counts: BTreeMap<u64, u64>,
    pub longest_increasing_run: usize,
    pub is_carlitz: bool,
    pub max_multiplicity: usize,
    pub all_distinct: bool,
}

pub fn naive_stats(t: &[u64]) -> NaiveStats {
    let comps = naive_runs(t, |x| x != 0);
    let gaps = naive_runs(t, |x| x == 0);
    let mut square_counts = BTreeMap::new();
    let mut largest_square = 0;
    for k in 1..=t.len() as u64 {
        let windows = t.windows(k as usize).filter(|w| w.iter().all(|&x| x == k)).count() as u64;
        if windows > 0 {
            largest_square = k;
            if k >= 2 {
                square_counts.insert(k, windows);
            }
        }
    }
    let mut lir = 0;
    for i in 0..t.len() {
        let mut j = i + 1;
        while j < t.len() && t[j] > t[j - 1] {
            j += 1;
        }
        lir = lir.max(j - i);
    }
    let max_multiplicity = t.iter().map(|x| t.iter().filter(|y| *y == x).count()).max().unwrap_or(0);
    NaiveStats {
        components: comps.len(),
        gaps: gaps.len(),
        cmax: comps.iter().copied().max().unwrap_or(0),
        cmin: comps.iter().copied().min().unwrap_or(0),
        gmax: gaps.iter().copied().max().unwrap_or(0),
        gmin: gaps.iter().copied().min().unwrap_or(0),
        tmax: *t.iter().max().unwrap(),
        tmin: *t.iter().min().unwrap(),
        largest_square,
        square_counts,
        longest_increasing_run: lir,
        is_carlitz: (1..t.len()).all(|i| t[i] != t[i - 1]),
        max_multiplicity,
        all_distinct: max_multiplicity <= 1,
    }
}

/// Patterns covering every kind and shape, used in exhaustive checks.
pub const CHECK_PATTERNS: [&str; 24] = [
    "e:[1]",
    "e:[0,0]",
    "e:[1,1]",
    "e:[2,0]",
    "e:[1,0,1]",
    "e:1,1",
    "e:0,2,0",
    "e:[1],[0,1]",
    "e:[0,1],[1]",
    "u:[1,1]",
    "u:[2]",
    "u:[1,0,1]",
    "u:2,1",
    "u:[1],[1,1]",
    "l:[0,0]",
    "l:[1,0]",
    "l:0,1,0",
    "l:[0],[0]",
    "o:[0,1]",
    "o:[1,0,1]",
    "o:[0,2,1]",
    "o:[0,0,0]",
    "o:0,1",
    "o:1,0,2",
];
