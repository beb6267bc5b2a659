//! Weak integer compositions and model parameters.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n`-term weak composition: a nonempty sequence of nonnegative terms.
///
/// Compositions are immutable values; evolution helpers in
/// [`crate::samplers`] return new compositions or work on an explicitly
/// owned buffer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Composition {
    terms: Vec<u64>,
}

impl Composition {
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("a composition needs at least one term"));
        }
        Ok(Composition { terms })
    }

    /// The empty composition `0^n`.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    pub(crate) fn from_vec_unchecked(terms: Vec<u64>) -> Self {
        debug_assert!(!terms.is_empty());
        Composition { terms }
    }

    /// Number of terms `n`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<u64> {
        self.terms
    }

    /// The 1-based term `C(i)`.
    pub fn term(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).and_then(|j| self.terms.get(j).copied())
    }

    /// Sum of the terms.
    pub fn size(&self) -> u64 {
        composition_size(&self.terms)
    }

    /// Renders the composition as a digit string, available only when
    /// every term is at most nine.
    pub fn to_digits(&self) -> Option<String> {
        self.terms
            .iter()
            .map(|&t| char::from_digit(u32::try_from(t).ok()?, 10))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.terms.len() * 2);
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&t.to_string());
        }
        s
    }

    /// Parses a comma-separated list (`2,0,13`) or, when the text has no
    /// comma, a digit string with one term per character (`2013` is
    /// 2,0,1,3). A lone multi-digit term is written with a trailing comma
    /// (`13,`).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Syntax { position: 0, message: "empty composition".into() });
        }
        if text.contains(',') {
            let body = text.strip_suffix(',').unwrap_or(text);
            let mut terms = Vec::new();
            let mut offset = 0;
            for piece in body.split(',') {
                let trimmed = piece.trim();
                let lead = piece.len() - piece.trim_start().len();
                if trimmed.is_empty() {
                    return Err(Error::Syntax {
                        position: offset + lead,
                        message: "expected a nonnegative integer".into(),
                    });
                }
                let value = trimmed.parse::<u64>().map_err(|_| Error::Syntax {
                    position: offset + lead,
                    message: format!("invalid term `{trimmed}`"),
                })?;
                terms.push(value);
                offset += piece.len() + 1;
            }
            Composition::new(terms)
        } else {
            let mut terms = Vec::with_capacity(text.len());
            for (pos, ch) in text.char_indices() {
                let digit = ch.to_digit(10).ok_or_else(|| Error::Syntax {
                    position: pos,
                    message: format!("unexpected character `{ch}`"),
                })?;
                terms.push(u64::from(digit));
            }
            Composition::new(terms)
        }
    }
}

impl FromStr for Composition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Composition::parse(s)
    }
}

impl TryFrom<Vec<u64>> for Composition {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Composition::new(v)
    }
}

impl From<Composition> for Vec<u64> {
    fn from(c: Composition) -> Self {
        c.terms
    }
}

impl AsRef<[u64]> for Composition {
    fn as_ref(&self) -> &[u64] {
        &self.terms
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())?;
        if self.terms.len() == 1 && self.terms[0] > 9 {
            f.write_str(",")?;
        }
        Ok(())
    }
}

/// Sum of the terms.
pub fn composition_size(terms: &[u64]) -> u64 {
    terms.iter().sum()
}

/// Number of `n`-compositions of `m`, `binom(m + n - 1, m)`, exactly.
pub fn count_compositions(n: u64, m: u64) -> BigUint {
    assert!(n >= 1, "n must be positive");
    binomial(m + n - 1, m.min(n - 1))
}

/// Exact binomial coefficient.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Parameters of the two static random models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    /// Uniform over all `n`-compositions of `m`.
    Uniform { n: u64, m: u64 },
    /// `n` i.i.d. terms with `P(k) = q p^k`.
    Geometric { n: u64, p: f64 },
}

impl ModelParams {
    pub fn uniform(n: u64, m: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        Ok(ModelParams::Uniform { n, m })
    }

    pub fn geometric(n: u64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        check_p(p)?;
        Ok(ModelParams::Geometric { n, p })
    }

    pub fn n(&self) -> u64 {
        match *self {
            ModelParams::Uniform { n, .. } | ModelParams::Geometric { n, .. } => n,
        }
    }

    /// `q = 1 - p` for the geometric model.
    pub fn q(&self) -> Option<f64> {
        match *self {
            ModelParams::Geometric { p, .. } => Some(1.0 - p),
            ModelParams::Uniform { .. } => None,
        }
    }

    /// Expected size: `m` for the uniform model, `n p / q` for the geometric one.
    pub fn mean_size(&self) -> f64 {
        match *self {
            ModelParams::Uniform { m, .. } => m as f64,
            ModelParams::Geometric { n, p } => n as f64 * p / (1.0 - p),
        }
    }
}

/// Validates `0 <= p < 1`.
pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param(format!("p must satisfy 0 <= p < 1, got {p}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(Composition::parse("000").unwrap().size(), 0);
        assert_eq!(Composition::parse("7").unwrap().size(), 7);
        assert_eq!(Composition::parse("12,0,3").unwrap().terms(), &[12, 0, 3]);
    }

    #[test]
    fn counts() {
        assert_eq!(count_compositions(3, 2), BigUint::from(6u32));
        assert_eq!(count_compositions(5, 0), BigUint::from(1u32));
        assert_eq!(count_compositions(1, 9), BigUint::from(1u32));
        assert_eq!(count_compositions(10, 10), BigUint::from(92378u32));
    }

    #[test]
    fn parse_errors_report_position() {
        match Composition::parse("1,2,x") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        match Composition::parse("12a") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(Composition::parse("").is_err());
        assert!(Composition::parse("1,,2").is_err());
    }

    #[test]
    fn digits_only_for_small_terms() {
        assert_eq!(Composition::parse("0,9").unwrap().to_digits().as_deref(), Some("09"));
        assert_eq!(Composition::parse("0,10").unwrap().to_digits(), None);
    }

    #[test]
    fn geometric_rejects_p_one() {
        assert!(ModelParams::geometric(3, 1.0).is_err());
        assert!(ModelParams::geometric(3, -0.1).is_err());
        let g = ModelParams::geometric(100, 0.5).unwrap();
        assert_eq!(g.mean_size(), 100.0);
    }
}
