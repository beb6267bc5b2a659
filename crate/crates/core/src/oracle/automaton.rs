use std::collections::HashMap;
use std::hash::Hash;

use statrs::function::gamma::ln_gamma;

use super::{ExactProbability, Method};
use crate::error::{Error, Result};
use crate::patterns::{PatternKind, Shape};
use crate::property::{Predicate, Property};
use crate::samplers::GeometricLaw;

/// Default target width of a truncated interval.
pub const DEFAULT_WIDTH: f64 = 1e-9;

const STATE_LIMIT: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpOptions {
    /// Target width of `[lo, hi]` when term values must be truncated.
    pub width: f64,
    /// Largest truncation point; past it the result is flagged.
    pub max_cap: u64,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { width: DEFAULT_WIDTH, max_cap: 400 }
    }
}

/// A deterministic automaton reading term values left to right.
trait Automaton {
    type State: Clone + Eq + Hash;
    fn start(&self) -> Self::State;
    fn step(&self, s: &Self::State, v: u64) -> Self::State;
    fn accepting(&self, s: &Self::State) -> bool;
    /// Sorted positive breakpoints `b_1 < ... < b_j` such that `step`
    /// depends on `v` only through the interval `[b_i, b_{i+1})` holding
    /// it, or `None` when individual values matter.
    fn breakpoints(&self) -> Option<Vec<u64>>;
}

struct Const(bool);

impl Automaton for Const {
    type State = ();
    fn start(&self) {}
    fn step(&self, _: &(), _: u64) {}
    fn accepting(&self, _: &()) -> bool {
        self.0
    }
    fn breakpoints(&self) -> Option<Vec<u64>> {
        Some(Vec::new())
    }
}

/// Greedy leftmost search for a sequence of blocks of exact, upper or
/// lower constraints separated by at least `gap` positions.
struct BlockSeq {
    kind: PatternKind,
    blocks: Vec<Vec<u64>>,
    gap: u8,
}

/// `(block, prefix mask, skip)`; `block == blocks.len()` once found.
/// Bit `i` of the mask: the last `i + 1` terms match the block prefix.
type BlockState = (usize, u128, u8);

impl BlockSeq {
    fn new(kind: PatternKind, blocks: Vec<Vec<u64>>, gap: usize) -> Result<Self> {
        if blocks.iter().any(|b| b.len() > 127) {
            return Err(Error::Unsupported("blocks longer than 127 terms".into()));
        }
        Ok(BlockSeq { kind, blocks, gap: gap as u8 })
    }

    fn fits(&self, r: u64, v: u64) -> bool {
        match self.kind {
            PatternKind::Exact => v == r,
            PatternKind::Upper => v >= r,
            _ => v <= r,
        }
    }
}

impl Automaton for BlockSeq {
    type State = BlockState;

    fn start(&self) -> BlockState {
        (0, 0, 0)
    }

    fn step(&self, &(j, mask, skip): &BlockState, v: u64) -> BlockState {
        if j == self.blocks.len() {
            return (j, 0, 0);
        }
        if skip > 0 {
            return (j, 0, skip - 1);
        }
        let block = &self.blocks[j];
        let len = block.len();
        let mut next = 0u128;
        for l in 0..len {
            let live = l == 0 || mask >> (l - 1) & 1 == 1;
            if live && self.fits(block[l], v) {
                if l + 1 == len {
                    return (j + 1, 0, if j + 1 == self.blocks.len() { 0 } else { self.gap });
                }
                next |= 1 << l;
            }
        }
        (j, next, 0)
    }

    fn accepting(&self, s: &BlockState) -> bool {
        s.0 == self.blocks.len()
    }

    fn breakpoints(&self) -> Option<Vec<u64>> {
        let mut b: Vec<u64> = Vec::new();
        for &r in self.blocks.iter().flatten() {
            match self.kind {
                PatternKind::Exact => b.extend([r, r + 1]),
                PatternKind::Upper => b.push(r),
                _ => b.push(r + 1),
            }
        }
        Some(b)
    }
}

/// No maximal run of zero (or nonzero) terms of length `1..=k`.
struct ShortRun {
    k: u32,
    nonzero: bool,
}

impl Automaton for ShortRun {
    /// Current run length capped at `k + 1`, or `None` after a failure.
    type State = Option<u32>;

    fn start(&self) -> Option<u32> {
        Some(0)
    }

    fn step(&self, s: &Option<u32>, v: u64) -> Option<u32> {
        let len = (*s)?;
        if (v != 0) == self.nonzero {
            Some((len + 1).min(self.k + 1))
        } else if len >= 1 && len <= self.k {
            None
        } else {
            Some(0)
        }
    }

    fn accepting(&self, s: &Option<u32>) -> bool {
        matches!(*s, Some(len) if len == 0 || len > self.k)
    }

    fn breakpoints(&self) -> Option<Vec<u64>> {
        Some(vec![1])
    }
}

/// At least `k` maximal runs of zero (or nonzero) terms.
struct RunCount {
    k: u32,
    nonzero: bool,
}

impl Automaton for RunCount {
    type State = (u32, bool);

    fn start(&self) -> (u32, bool) {
        (0, false)
    }

    fn step(&self, &(count, inside): &(u32, bool), v: u64) -> (u32, bool) {
        let now = (v != 0) == self.nonzero;
        let count = if now && !inside { (count + 1).min(self.k) } else { count };
        (count, now)
    }

    fn accepting(&self, s: &(u32, bool)) -> bool {
        s.0 >= self.k
    }

    fn breakpoints(&self) -> Option<Vec<u64>> {
        Some(vec![1])
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Track {
    Done,
    Last(u64, u32),
}

/// A run of `k` equal terms, optionally nonzero.
struct EqualRun {
    k: u32,
    nonzero: bool,
}

impl Automaton for EqualRun {
    type State = Track;

    fn start(&self) -> Track {
        if self.k == 0 {
            Track::Done
        } else {
            Track::Last(u64::MAX, 0)
        }
    }

    fn step(&self, s: &Track, v: u64) -> Track {
        let Track::Last(last, len) = *s else { return Track::Done };
        let len = if v == last { len + 1 } else { 1 };
        if len >= self.k && !(self.nonzero && v == 0) {
            Track::Done
        } else {
            Track::Last(v, len)
        }
    }

    fn accepting(&self, s: &Track) -> bool {
        *s == Track::Done
    }

    fn breakpoints(&self) -> Option<Vec<u64>> {
        None
    }
}

/// A strictly increasing run of `k` terms.
struct IncreasingRun {
    k: u32,
}

impl Automaton for IncreasingRun {
    type State = Track;

    fn start(&self) -> Track {
        if self.k == 0 {
            Track::Done
        } else {
            Track::Last(0, 0)
        }
    }

    fn step(&self, s: &Track, v: u64) -> Track {
        let Track::Last(last, len) = *s else { return Track::Done };
        let len = if len > 0 && v > last { len + 1 } else { 1 };
        if len >= self.k {
            Track::Done
        } else {
            Track::Last(v, len)
        }
    }

    fn accepting(&self, s: &Track) -> bool {
        *s == Track::Done
    }

    fn breakpoints(&self) -> Option<Vec<u64>> {
        None
    }
}

/// A window of `k` consecutive terms order-isomorphic to the pattern.
struct OrderWindow {
    pattern: Vec<u64>,
}

impl Automaton for OrderWindow {
    /// The last `min(k - 1, seen)` terms, or `None` once found.
    type State = Option<Vec<u64>>;

    fn start(&self) -> Option<Vec<u64>> {
        Some(Vec::new())
    }

    fn step(&self, s: &Option<Vec<u64>>, v: u64) -> Option<Vec<u64>> {
        let tail = s.as_ref()?;
        let k = self.pattern.len();
        let mut w = tail.clone();
        w.push(v);
        if w.len() == k {
            let same = (0..k).all(|i| (i + 1..k).all(|j| w[i].cmp(&w[j]) == self.pattern[i].cmp(&self.pattern[j])));
            if same {
                return None;
            }
        }
        if w.len() >= k {
            w.remove(0);
        }
        Some(w)
    }

    fn accepting(&self, s: &Option<Vec<u64>>) -> bool {
        s.is_none()
    }

    fn breakpoints(&self) -> Option<Vec<u64>> {
        None
    }
}

/// Interns automaton states and caches transitions per letter.
struct Table<'a, A: Automaton> {
    automaton: &'a A,
    states: Vec<A::State>,
    index: HashMap<A::State, usize>,
    trans: Vec<Option<Vec<usize>>>,
}

impl<'a, A: Automaton> Table<'a, A> {
    fn new(automaton: &'a A) -> Self {
        let mut t = Table { automaton, states: Vec::new(), index: HashMap::new(), trans: Vec::new() };
        t.intern(automaton.start());
        t
    }

    fn intern(&mut self, s: A::State) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.trans.push(None);
        i
    }

    fn transitions(&mut self, i: usize, letters: &[u64]) -> Result<&[usize]> {
        if self.trans[i].is_none() {
            let mut row = Vec::with_capacity(letters.len());
            for &v in letters {
                let next = self.automaton.step(&self.states[i], v);
                row.push(self.intern(next));
            }
            if self.states.len() > STATE_LIMIT {
                return Err(Error::GuardExceeded { count: self.states.len().to_string(), limit: STATE_LIMIT as u64 });
            }
            self.trans[i] = Some(row);
        }
        Ok(self.trans[i].as_deref().unwrap_or(&[]))
    }

    fn accepting(&self, i: usize) -> bool {
        self.automaton.accepting(&self.states[i])
    }
}

/// Total weight of accepted words of length `n`, where letter `v`
/// carries weight `w`.
fn accepted_mass<A: Automaton>(a: &A, letters: &[(u64, f64)], n: u64) -> Result<f64> {
    let values: Vec<u64> = letters.iter().map(|l| l.0).collect();
    let mut table = Table::new(a);
    let mut dist = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![0.0f64; table.states.len()];
        for (i, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let row = table.transitions(i, &values)?;
            for (&j, &(_, w)) in row.iter().zip(letters) {
                if j >= next.len() {
                    next.resize(j + 1, 0.0);
                }
                next[j] += mass * w;
            }
        }
        dist = next;
    }
    Ok(dist.iter().enumerate().filter(|&(i, _)| table.accepting(i)).map(|(_, m)| m).sum())
}

/// Joint and marginal weights of words of length `n` summing to `m`.
fn mass_given_size<A: Automaton>(a: &A, law: &GeometricLaw, n: u64, m: u64) -> Result<(f64, f64)> {
    let width = m as usize + 1;
    let values: Vec<u64> = (0..=m).collect();
    let weights: Vec<f64> = values.iter().map(|&v| law.pmf(v)).collect();
    let mut table = Table::new(a);
    let mut dist: Vec<Vec<f64>> = vec![{
        let mut row = vec![0.0; width];
        row[0] = 1.0;
        row
    }];
    for _ in 0..n {
        let mut next: Vec<Vec<f64>> = vec![vec![0.0; width]; table.states.len()];
        for i in 0..dist.len() {
            if dist[i].iter().all(|&x| x == 0.0) {
                continue;
            }
            let row = table.transitions(i, &values)?.to_vec();
            if row.iter().any(|&j| j >= next.len()) {
                next.resize(table.states.len(), vec![0.0; width]);
            }
            if next.len() * width > 4 * STATE_LIMIT {
                return Err(Error::GuardExceeded { count: (next.len() * width).to_string(), limit: 4 * STATE_LIMIT as u64 });
            }
            for (sum, &mass) in dist[i].iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for v in 0..width - sum {
                    next[row[v]][sum + v] += mass * weights[v];
                }
            }
        }
        dist = next;
    }
    let mut joint = 0.0;
    let mut total = 0.0;
    for (i, row) in dist.iter().enumerate() {
        total += row[m as usize];
        if table.accepting(i) {
            joint += row[m as usize];
        }
    }
    Ok((joint, total))
}

/// Letters for the value classes cut at `breakpoints`, weighted by the
/// exact class probability.
fn class_letters(law: &GeometricLaw, mut breakpoints: Vec<u64>) -> Vec<(u64, f64)> {
    breakpoints.retain(|&b| b > 0);
    breakpoints.sort_unstable();
    breakpoints.dedup();
    let mut cuts = vec![0u64];
    cuts.extend(breakpoints);
    let mut letters = Vec::with_capacity(cuts.len());
    for (i, &a) in cuts.iter().enumerate() {
        let w = match cuts.get(i + 1) {
            Some(&b) if law.p() == 0.0 => {
                if a == 0 && b > 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Some(&b) => law.tail(a) * -((b - a) as f64 * law.ln_p()).exp_m1(),
            None => law.tail(a),
        };
        letters.push((a, w));
    }
    letters
}

/// `P(some term > v)` among `n` terms.
fn overflow(law: &GeometricLaw, n: u64, v: u64) -> f64 {
    let t = law.tail(v + 1);
    -(n as f64 * (-t).ln_1p()).exp_m1()
}

/// Smallest truncation point whose overflow is within `width`, capped.
fn truncation(law: &GeometricLaw, n: u64, opts: &DpOptions) -> (u64, f64) {
    if law.p() == 0.0 {
        return (0, 0.0);
    }
    let guess = ((opts.width / n as f64).ln() / law.ln_p()).ceil();
    let mut v = if guess.is_finite() && guess > 1.0 { (guess as u64 - 1).min(opts.max_cap) } else { 0 };
    while v < opts.max_cap && overflow(law, n, v) > opts.width {
        v += 1;
    }
    while v > 0 && overflow(law, n, v - 1) <= opts.width {
        v -= 1;
    }
    (v, overflow(law, n, v))
}

fn probability<A: Automaton>(a: &A, law: &GeometricLaw, n: u64, opts: &DpOptions) -> Result<ExactProbability> {
    match a.breakpoints() {
        Some(b) => {
            let x = accepted_mass(a, &class_letters(law, b), n)?.clamp(0.0, 1.0);
            Ok(ExactProbability { method: Method::TransferDp, lo: x, hi: x, rational: None, cap: None, flagged: false })
        }
        None => {
            let (cap, spill) = truncation(law, n, opts);
            let letters: Vec<(u64, f64)> = (0..=cap).map(|v| (v, law.pmf(v))).collect();
            let lo = accepted_mass(a, &letters, n)?.clamp(0.0, 1.0);
            let hi = (lo + spill).min(1.0);
            Ok(ExactProbability {
                method: Method::TransferDp,
                lo,
                hi,
                rational: None,
                cap: (spill > 0.0).then_some(cap),
                flagged: spill > opts.width,
            })
        }
    }
}

/// Runs `f` on the automaton recognising `pred`; the flag asks for the
/// complement of the result.
trait Visit {
    type Out;
    fn visit<A: Automaton>(self, a: &A) -> Result<Self::Out>;
}

fn dispatch<V: Visit>(pred: &Predicate, n: u64, f: V) -> Result<(V::Out, bool)> {
    let ones = |k: usize, v: u64| vec![vec![v; k]];
    let plain = |kind, blocks| BlockSeq::new(kind, blocks, 0);
    Ok(match pred {
        Predicate::CmaxGe(k) => (f.visit(&plain(PatternKind::Upper, ones(*k, 1))?)?, false),
        Predicate::GmaxGe(k) => (f.visit(&plain(PatternKind::Lower, ones(*k, 0))?)?, false),
        Predicate::CminGt(k) => (f.visit(&ShortRun { k: clamp_u32(*k), nonzero: true })?, false),
        Predicate::GminGt(k) => (f.visit(&ShortRun { k: clamp_u32(*k), nonzero: false })?, false),
        Predicate::ComponentsGe(k) => (f.visit(&RunCount { k: clamp_u32(*k), nonzero: true })?, false),
        Predicate::GapsGe(k) => (f.visit(&RunCount { k: clamp_u32(*k), nonzero: false })?, false),
        Predicate::TmaxGe(r) => (f.visit(&plain(PatternKind::Upper, ones(1, *r))?)?, false),
        Predicate::TminGe(0) => (f.visit(&Const(true))?, false),
        Predicate::TminGe(r) => (f.visit(&plain(PatternKind::Lower, ones(1, r - 1))?)?, true),
        Predicate::Carlitz => (f.visit(&EqualRun { k: 2, nonzero: false })?, true),
        Predicate::EqualRun(k) => (f.visit(&EqualRun { k: clamp_u32(*k), nonzero: false })?, false),
        Predicate::EqualNonzeroRun(k) => (f.visit(&EqualRun { k: clamp_u32(*k), nonzero: true })?, false),
        Predicate::Square(k) if *k == 0 || *k > n => (f.visit(&Const(false))?, false),
        Predicate::Square(k) => (f.visit(&plain(PatternKind::Exact, ones(*k as usize, *k))?)?, false),
        Predicate::IncreasingRun(k) => (f.visit(&IncreasingRun { k: clamp_u32(*k) })?, false),
        Predicate::Contains(spec, _) if spec.length() as u64 > n => (f.visit(&Const(false))?, false),
        Predicate::Contains(spec, gap) if spec.kind() != PatternKind::Ordering => {
            (f.visit(&BlockSeq::new(spec.kind(), spec.blocks().to_vec(), gap.min_gap())?)?, false)
        }
        Predicate::Contains(spec, _) if spec.shape() == Shape::Consecutive => {
            (f.visit(&OrderWindow { pattern: spec.terms() })?, false)
        }
        Predicate::Contains(spec, _) => {
            return Err(Error::Unsupported(format!("no transfer automaton for `{spec}`")));
        }
        Predicate::EqualTerms(_) | Predicate::AllDistinct => {
            return Err(Error::Unsupported(format!("no transfer automaton for `{}`", pred.id())));
        }
    })
}

fn clamp_u32(k: usize) -> u32 {
    k.min(u32::MAX as usize - 1) as u32
}

struct Unconditional<'a> {
    law: &'a GeometricLaw,
    n: u64,
    opts: &'a DpOptions,
}

impl Visit for Unconditional<'_> {
    type Out = ExactProbability;
    fn visit<A: Automaton>(self, a: &A) -> Result<ExactProbability> {
        probability(a, self.law, self.n, self.opts)
    }
}

struct GivenSize<'a> {
    law: &'a GeometricLaw,
    n: u64,
    m: u64,
}

impl Visit for GivenSize<'_> {
    type Out = (f64, f64);
    fn visit<A: Automaton>(self, a: &A) -> Result<(f64, f64)> {
        mass_given_size(a, self.law, self.n, self.m)
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    Ok(())
}

/// `P(property)` for a composition of `n` i.i.d. geometric terms.
pub fn exact_prob_geometric_law(
    n: u64,
    law: &GeometricLaw,
    property: &Property,
    opts: &DpOptions,
) -> Result<ExactProbability> {
    check_n(n)?;
    let (r, flip) = dispatch(&property.predicate, n, Unconditional { law, n, opts })?;
    Ok(if flip != property.negate { r.complement() } else { r })
}

/// [`exact_prob_geometric_law`] with `P(term >= k) = p^k`.
pub fn exact_prob_geometric(n: u64, p: f64, property: &Property, opts: &DpOptions) -> Result<ExactProbability> {
    exact_prob_geometric_law(n, &GeometricLaw::from_p(p)?, property, opts)
}

/// `P(property | size = m)` under the geometric model. Conditioned on its
/// size the geometric model is uniform, so this matches the uniform
/// model for every `p` up to rounding.
pub fn exact_prob_geometric_given_size(n: u64, p: f64, m: u64, property: &Property) -> Result<ExactProbability> {
    check_n(n)?;
    let law = GeometricLaw::from_p(p)?;
    if p == 0.0 && m > 0 {
        return Err(Error::param("size m > 0 has probability zero when p = 0"));
    }
    let ((joint, total), flip) = dispatch(&property.predicate, n, GivenSize { law: &law, n, m })?;
    let x = (joint / total).clamp(0.0, 1.0);
    let r = ExactProbability { method: Method::TransferDp, lo: x, hi: x, rational: None, cap: None, flagged: false };
    Ok(if flip != property.negate { r.complement() } else { r })
}

/// `P(size = m) = binom(m+n-1, m) p^m q^n`, computed in log space.
pub fn prob_size_geometric(n: u64, p: f64, m: u64) -> Result<f64> {
    check_n(n)?;
    let law = GeometricLaw::from_p(p)?;
    if p == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let (nf, mf) = (n as f64, m as f64);
    let ln = ln_gamma(mf + nf) - ln_gamma(mf + 1.0) - ln_gamma(nf) + mf * law.ln_p() + nf * law.q().ln();
    Ok(ln.exp())
}
