//! Named properties of a composition, as used by sweeps and oracles.
//!
//! Each property has a predicate and an occurrence count whose limiting
//! law is Poisson near the corresponding threshold.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::patterns::{self, GapMode, PatternSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// Some component has length at least `k`.
    CmaxGe(usize),
    /// Some gap has length at least `k`.
    GmaxGe(usize),
    /// No component has length at most `k`.
    CminGt(usize),
    /// No gap has length at most `k`.
    GminGt(usize),
    ComponentsGe(usize),
    GapsGe(usize),
    /// Some term is at least `r`.
    TmaxGe(u64),
    /// Every term is at least `r`.
    TminGe(u64),
    Carlitz,
    /// Some run of `k` equal terms.
    EqualRun(usize),
    /// Some run of `k` equal nonzero terms.
    EqualNonzeroRun(usize),
    /// Some value occurs at least `k` times.
    EqualTerms(usize),
    AllDistinct,
    /// Some `k` consecutive terms all equal `k`.
    Square(u64),
    /// Some strictly increasing run of length `k`.
    IncreasingRun(usize),
    Contains(PatternSpec, GapMode),
}

const NEEDS_K: [&str; 13] = [
    "cmax_ge",
    "gmax_ge",
    "cmin_gt",
    "gmin_gt",
    "components_ge",
    "gaps_ge",
    "tmax_ge",
    "tmin_ge",
    "equal_run",
    "equal_nonzero_run",
    "equal_terms",
    "square",
    "increasing_run",
];

/// Property ids accepted by [`Predicate::from_id`].
pub const PROPERTY_IDS: [&str; 15] = [
    "cmax_ge",
    "gmax_ge",
    "cmin_gt",
    "gmin_gt",
    "components_ge",
    "gaps_ge",
    "tmax_ge",
    "tmin_ge",
    "carlitz",
    "equal_run",
    "equal_nonzero_run",
    "equal_terms",
    "all_distinct",
    "square",
    "increasing_run",
];

impl Predicate {
    /// Builds a statistic predicate from its id and threshold `k` (or `r`).
    pub fn from_id(id: &str, k: Option<u64>) -> Result<Self> {
        if NEEDS_K.contains(&id) && k.is_none() {
            return Err(Error::param(format!("property `{id}` needs parameter k")));
        }
        let k = k.unwrap_or(0);
        let ku = k as usize;
        let pred = match id {
            "cmax_ge" => Predicate::CmaxGe(ku),
            "gmax_ge" => Predicate::GmaxGe(ku),
            "cmin_gt" => Predicate::CminGt(ku),
            "gmin_gt" => Predicate::GminGt(ku),
            "components_ge" => Predicate::ComponentsGe(ku),
            "gaps_ge" => Predicate::GapsGe(ku),
            "tmax_ge" => Predicate::TmaxGe(k),
            "tmin_ge" => Predicate::TminGe(k),
            "carlitz" => Predicate::Carlitz,
            "equal_run" => Predicate::EqualRun(ku),
            "equal_nonzero_run" => Predicate::EqualNonzeroRun(ku),
            "equal_terms" => Predicate::EqualTerms(ku),
            "all_distinct" => Predicate::AllDistinct,
            "square" => Predicate::Square(k),
            "increasing_run" => Predicate::IncreasingRun(ku),
            other => return Err(Error::UnknownStatistic(other.to_string())),
        };
        Ok(pred)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Predicate::CmaxGe(_) => "cmax_ge",
            Predicate::GmaxGe(_) => "gmax_ge",
            Predicate::CminGt(_) => "cmin_gt",
            Predicate::GminGt(_) => "gmin_gt",
            Predicate::ComponentsGe(_) => "components_ge",
            Predicate::GapsGe(_) => "gaps_ge",
            Predicate::TmaxGe(_) => "tmax_ge",
            Predicate::TminGe(_) => "tmin_ge",
            Predicate::Carlitz => "carlitz",
            Predicate::EqualRun(_) => "equal_run",
            Predicate::EqualNonzeroRun(_) => "equal_nonzero_run",
            Predicate::EqualTerms(_) => "equal_terms",
            Predicate::AllDistinct => "all_distinct",
            Predicate::Square(_) => "square",
            Predicate::IncreasingRun(_) => "increasing_run",
            Predicate::Contains(..) => "pattern",
        }
    }

    /// The threshold parameter, for statistics that have one.
    pub fn param(&self) -> Option<u64> {
        match *self {
            Predicate::CmaxGe(k)
            | Predicate::GmaxGe(k)
            | Predicate::CminGt(k)
            | Predicate::GminGt(k)
            | Predicate::ComponentsGe(k)
            | Predicate::GapsGe(k)
            | Predicate::EqualRun(k)
            | Predicate::EqualNonzeroRun(k)
            | Predicate::EqualTerms(k)
            | Predicate::IncreasingRun(k) => Some(k as u64),
            Predicate::TmaxGe(r) | Predicate::TminGe(r) | Predicate::Square(r) => Some(r),
            _ => None,
        }
    }

    pub fn eval(&self, c: &Composition) -> Result<bool> {
        let t = c.terms();
        Ok(match self {
            Predicate::CmaxGe(k) => longest_run(t, |x| x != 0) >= *k,
            Predicate::GmaxGe(k) => longest_run(t, |x| x == 0) >= *k,
            Predicate::CminGt(k) => short_runs(t, *k, |x| x != 0) == 0,
            Predicate::GminGt(k) => short_runs(t, *k, |x| x == 0) == 0,
            Predicate::ComponentsGe(k) => run_count(t, |x| x != 0) >= *k,
            Predicate::GapsGe(k) => run_count(t, |x| x == 0) >= *k,
            Predicate::TmaxGe(r) => t.iter().any(|&x| x >= *r),
            Predicate::TminGe(r) => t.iter().all(|&x| x >= *r),
            Predicate::Carlitz => analysis::is_carlitz(c),
            Predicate::EqualRun(k) => longest_equal_run(t, false) >= *k,
            Predicate::EqualNonzeroRun(k) => longest_equal_run(t, true) >= *k,
            Predicate::EqualTerms(k) => analysis::max_multiplicity(c) >= *k,
            Predicate::AllDistinct => analysis::all_distinct(c),
            Predicate::Square(k) => *k >= 1 && square_windows(t, *k) > 0,
            Predicate::IncreasingRun(k) => analysis::longest_increasing_run(c) >= *k,
            Predicate::Contains(spec, gap) => patterns::contains(c, spec, *gap)?,
        })
    }

    /// The occurrence count `X` behind the property: windows for run and
    /// pattern properties, short runs for `cmin_gt`/`gmin_gt`, offending
    /// terms for `tmax_ge`/`tmin_ge`, equal-value `k`-sets for
    /// `equal_terms` and `all_distinct`.
    pub fn count(&self, c: &Composition) -> Result<u64> {
        let t = c.terms();
        Ok(match self {
            Predicate::CmaxGe(k) => run_windows(t, *k, |x| x != 0),
            Predicate::GmaxGe(k) => run_windows(t, *k, |x| x == 0),
            Predicate::CminGt(k) => short_runs(t, *k, |x| x != 0) as u64,
            Predicate::GminGt(k) => short_runs(t, *k, |x| x == 0) as u64,
            Predicate::ComponentsGe(_) => run_count(t, |x| x != 0) as u64,
            Predicate::GapsGe(_) => run_count(t, |x| x == 0) as u64,
            Predicate::TmaxGe(r) => t.iter().filter(|&&x| x >= *r).count() as u64,
            Predicate::TminGe(r) => t.iter().filter(|&&x| x < *r).count() as u64,
            Predicate::Carlitz => equal_windows(t, 2, false),
            Predicate::EqualRun(k) => equal_windows(t, *k, false),
            Predicate::EqualNonzeroRun(k) => equal_windows(t, *k, true),
            Predicate::EqualTerms(k) => equal_value_sets(t, *k),
            Predicate::AllDistinct => equal_value_sets(t, 2),
            Predicate::Square(k) => square_windows(t, *k),
            Predicate::IncreasingRun(k) => increasing_windows(t, *k),
            Predicate::Contains(spec, gap) => {
                let r = patterns::count_occurrences(c, spec, *gap)?;
                if r.truncated {
                    return Err(Error::Unsupported(format!("occurrence count of `{spec}` was truncated")));
                }
                r.count
            }
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self, self.param()) {
            (Predicate::Contains(spec, GapMode::Loose), _) => write!(f, "contains {spec}"),
            (Predicate::Contains(spec, GapMode::Strict), _) => write!(f, "contains {spec} (strict gaps)"),
            (_, Some(k)) => write!(f, "{} k={k}", self.id()),
            (_, None) => f.write_str(self.id()),
        }
    }
}

/// A predicate, possibly negated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub predicate: Predicate,
    pub negate: bool,
}

impl Property {
    pub fn new(predicate: Predicate) -> Self {
        Property { predicate, negate: false }
    }

    pub fn negated(predicate: Predicate) -> Self {
        Property { predicate, negate: true }
    }

    pub fn eval(&self, c: &Composition) -> Result<bool> {
        Ok(self.predicate.eval(c)? != self.negate)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negate {
            write!(f, "not ({})", self.predicate)
        } else {
            self.predicate.fmt(f)
        }
    }
}

/// Serialized form of a property: either a statistic id with parameter
/// `k`, or a pattern with a gap mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapMode>,
    #[serde(default)]
    pub negate: bool,
}

impl PropertySpec {
    pub fn build(&self) -> Result<Property> {
        let predicate = match (&self.statistic, &self.pattern) {
            (Some(id), None) => Predicate::from_id(id, self.k)?,
            (None, Some(spec)) => Predicate::Contains(spec.clone(), self.gap.unwrap_or_default()),
            (Some(_), Some(_)) => return Err(Error::Config("property takes a statistic or a pattern, not both".into())),
            (None, None) => return Err(Error::Config("property needs a statistic or a pattern".into())),
        };
        Ok(Property { predicate, negate: self.negate })
    }
}

fn longest_run(t: &[u64], pred: impl Fn(u64) -> bool) -> usize {
    let (mut best, mut cur) = (0usize, 0usize);
    for &x in t {
        cur = if pred(x) { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

fn run_count(t: &[u64], pred: impl Fn(u64) -> bool) -> usize {
    let mut count = 0;
    let mut inside = false;
    for &x in t {
        let now = pred(x);
        if now && !inside {
            count += 1;
        }
        inside = now;
    }
    count
}

/// Maximal runs of length at most `k`.
fn short_runs(t: &[u64], k: usize, pred: impl Fn(u64) -> bool) -> usize {
    let mut count = 0;
    let mut cur = 0usize;
    for &x in t {
        if pred(x) {
            cur += 1;
        } else {
            if cur > 0 && cur <= k {
                count += 1;
            }
            cur = 0;
        }
    }
    if cur > 0 && cur <= k {
        count += 1;
    }
    count
}

/// Window starts `i` with `t[i..i+k]` all satisfying `pred`.
fn run_windows(t: &[u64], k: usize, pred: impl Fn(u64) -> bool) -> u64 {
    if k == 0 {
        return t.len() as u64 + 1;
    }
    let mut cur = 0usize;
    let mut count = 0u64;
    for &x in t {
        cur = if pred(x) { cur + 1 } else { 0 };
        if cur >= k {
            count += 1;
        }
    }
    count
}

fn longest_equal_run(t: &[u64], nonzero_only: bool) -> usize {
    let mut best = 0usize;
    let mut cur = 0usize;
    for i in 0..t.len() {
        cur = if i > 0 && t[i] == t[i - 1] { cur + 1 } else { 1 };
        if !(nonzero_only && t[i] == 0) {
            best = best.max(cur);
        }
    }
    best
}

fn equal_windows(t: &[u64], k: usize, nonzero_only: bool) -> u64 {
    let mut cur = 0usize;
    let mut count = 0u64;
    for i in 0..t.len() {
        cur = if i > 0 && t[i] == t[i - 1] { cur + 1 } else { 1 };
        if cur >= k.max(1) && !(nonzero_only && t[i] == 0) {
            count += 1;
        }
    }
    count
}

fn square_windows(t: &[u64], k: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    run_windows(t, k as usize, |x| x == k)
}

fn increasing_windows(t: &[u64], k: usize) -> u64 {
    let mut cur = 0usize;
    let mut count = 0u64;
    for i in 0..t.len() {
        cur = if i > 0 && t[i] > t[i - 1] { cur + 1 } else { 1 };
        if cur >= k.max(1) {
            count += 1;
        }
    }
    count
}

fn equal_value_sets(t: &[u64], k: usize) -> u64 {
    let mut sorted = t.to_vec();
    sorted.sort_unstable();
    sorted
        .chunk_by(|a, b| a == b)
        .map(|g| {
            let n = g.len() as u128;
            let mut acc = 1u128;
            for i in 0..k as u128 {
                if i >= n {
                    return 0;
                }
                acc = acc * (n - i) / (i + 1);
            }
            acc.min(u64::MAX as u128) as u64
        })
        .fold(0u64, u64::saturating_add)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures::figure1;
    use crate::patterns::parse_pattern;

    fn comp(s: &str) -> Composition {
        Composition::parse(s).unwrap()
    }

    #[test]
    fn predicates_on_figure_one() {
        let c = figure1();
        let holds = |id: &str, k: u64| Predicate::from_id(id, Some(k)).unwrap().eval(&c).unwrap();
        assert!(holds("cmax_ge", 7) && !holds("cmax_ge", 8));
        assert!(holds("gmax_ge", 4) && !holds("gmax_ge", 5));
        assert!(holds("components_ge", 10) && !holds("components_ge", 11));
        assert!(holds("tmax_ge", 6) && !holds("tmax_ge", 7));
        assert!(holds("square", 4) && holds("square", 2) && !holds("square", 3));
        assert!(holds("increasing_run", 3) && !holds("increasing_run", 4));
        assert!(holds("equal_terms", 17) && !holds("equal_terms", 18));
        assert!(!Predicate::Carlitz.eval(&c).unwrap());
    }

    #[test]
    fn counts() {
        let c = comp("0110111022");
        assert_eq!(Predicate::CmaxGe(2).count(&c).unwrap(), 4);
        assert_eq!(Predicate::CminGt(2).count(&c).unwrap(), 2);
        assert!(!Predicate::CminGt(2).eval(&c).unwrap());
        assert!(Predicate::CminGt(1).eval(&c).unwrap());
        assert_eq!(Predicate::EqualRun(2).count(&c).unwrap(), 4);
        assert_eq!(Predicate::EqualRun(2).count(&comp("0011")).unwrap(), 2);
        assert_eq!(Predicate::EqualNonzeroRun(2).count(&c).unwrap(), 4);
        assert_eq!(Predicate::AllDistinct.count(&c).unwrap(), 3 + 10 + 1);
        assert_eq!(Predicate::TminGe(1).count(&c).unwrap(), 3);
        let spec = parse_pattern("u:[1,1]").unwrap();
        assert_eq!(Predicate::Contains(spec, GapMode::Loose).count(&c).unwrap(), 4);
    }

    #[test]
    fn empty_run_conventions() {
        let z = comp("000");
        assert!(Predicate::CminGt(5).eval(&z).unwrap());
        assert!(!Predicate::GminGt(3).eval(&z).unwrap());
        assert!(Predicate::GminGt(2).eval(&z).unwrap());
    }

    #[test]
    fn spec_building() {
        let p = PropertySpec { statistic: Some("cmax_ge".into()), k: Some(2), ..Default::default() }.build().unwrap();
        assert_eq!(p.predicate, Predicate::CmaxGe(2));
        assert!(PropertySpec { statistic: Some("cmax_ge".into()), ..Default::default() }.build().is_err());
        assert!(matches!(Predicate::from_id("nope", None), Err(Error::UnknownStatistic(_))));
        let neg = PropertySpec { statistic: Some("all_distinct".into()), negate: true, ..Default::default() };
        assert!(neg.build().unwrap().eval(&comp("11")).unwrap());
    }
}
