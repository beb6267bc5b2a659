//! Exact ground truth at small scale: full enumeration of the uniform
//! model and automaton dynamic programs for the geometric model.

mod automaton;
mod enumerate;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use automaton::{
    exact_prob_geometric, exact_prob_geometric_given_size, exact_prob_geometric_law, prob_size_geometric,
    DpOptions, DEFAULT_WIDTH,
};
pub use enumerate::{enumerate_uniform, exact_prob_uniform, ENUMERATION_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    TransferDp,
}

/// An exact probability: a rational for enumeration, or a certified
/// interval `[lo, hi]` for the geometric dynamic program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactProbability {
    pub method: Method,
    pub lo: f64,
    pub hi: f64,
    /// `num/den` text for enumeration results.
    #[serde(skip_serializing_if = "Option::is_none", with = "rational_text")]
    pub rational: Option<BigRational>,
    /// Term values were truncated to `0..=cap`; `None` when no truncation
    /// was needed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    /// The interval is wider than the requested width.
    pub flagged: bool,
}

impl ExactProbability {
    pub(crate) fn from_rational(r: BigRational) -> Self {
        let v = r.to_f64().unwrap_or(f64::NAN);
        ExactProbability { method: Method::Enumeration, lo: v, hi: v, rational: Some(r), cap: None, flagged: false }
    }

    pub fn value(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `P(not A)` from `P(A)`.
    pub fn complement(&self) -> Self {
        let one = BigRational::from_integer(BigInt::from(1));
        ExactProbability {
            method: self.method,
            lo: 1.0 - self.hi,
            hi: 1.0 - self.lo,
            rational: self.rational.as_ref().map(|r| &one - r),
            cap: self.cap,
            flagged: self.flagged,
        }
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

mod rational_text {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| {
            let (n, den) = t.split_once('/').unwrap_or((t.as_str(), "1"));
            let n = n.parse().map_err(serde::de::Error::custom)?;
            let den = den.parse().map_err(serde::de::Error::custom)?;
            Ok(BigRational::new(n, den))
        })
        .transpose()
    }
}
