use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::ExactProbability;
use crate::composition::{count_compositions, Composition};
use crate::error::{Error, Result};

/// Largest number of compositions a single enumeration may visit.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

fn guard(n: u64, m: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let total: BigUint = count_compositions(n, m);
    match total.to_u64() {
        Some(t) if t <= ENUMERATION_LIMIT => Ok(t),
        _ => Err(Error::GuardExceeded { count: total.to_string(), limit: ENUMERATION_LIMIT }),
    }
}

/// Visits every `n`-composition of `m` once, in increasing lexicographic
/// order from `(0,...,0,m)` to `(m,0,...,0)`, and returns the number
/// visited.
pub fn enumerate_uniform(n: u64, m: u64, mut visitor: impl FnMut(&[u64])) -> Result<u64> {
    let total = guard(n, m)?;
    let n = n as usize;
    let mut c = vec![0u64; n];
    c[n - 1] = m;
    let mut visited = 0u64;
    loop {
        visitor(&c);
        visited += 1;
        // Rightmost nonzero term.
        let last = match c.iter().rposition(|&x| x != 0) {
            Some(l) if l > 0 => l,
            _ => break,
        };
        let v = c[last];
        c[last] = 0;
        c[last - 1] += 1;
        c[n - 1] = v - 1;
    }
    debug_assert_eq!(visited, total);
    Ok(visited)
}

/// `#{c : pred(c)} / binom(m+n-1, m)` as an exact rational.
pub fn exact_prob_uniform(n: u64, m: u64, mut pred: impl FnMut(&Composition) -> bool) -> Result<ExactProbability> {
    let mut hits = 0u64;
    let total = enumerate_uniform(n, m, |terms| {
        if pred(&Composition::from_vec_unchecked(terms.to_vec())) {
            hits += 1;
        }
    })?;
    Ok(ExactProbability::from_rational(BigRational::new(BigInt::from(hits), BigInt::from(total))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis;
    use crate::patterns::{contains, parse_pattern, GapMode};

    fn all(n: u64, m: u64) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        enumerate_uniform(n, m, |c| out.push(c.to_vec())).unwrap();
        out
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(
            all(3, 2),
            vec![vec![0, 0, 2], vec![0, 1, 1], vec![0, 2, 0], vec![1, 0, 1], vec![1, 1, 0], vec![2, 0, 0]]
        );
        assert_eq!(all(1, 5), vec![vec![5]]);
        assert_eq!(all(4, 0), vec![vec![0, 0, 0, 0]]);
    }

    #[test]
    fn counts_match_binomial() {
        for n in 1..=8u64 {
            for m in 0..=(20 - n) {
                let mut visited = 0u64;
                let mut prev: Option<Vec<u64>> = None;
                enumerate_uniform(n, m, |c| {
                    assert_eq!(c.iter().sum::<u64>(), m);
                    if let Some(p) = &prev {
                        assert!(p.as_slice() < c);
                    }
                    prev = Some(c.to_vec());
                    visited += 1;
                })
                .unwrap();
                assert_eq!(BigUint::from(visited), count_compositions(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn exact_probabilities() {
        let p11 = parse_pattern("e:[1,1]").unwrap();
        let r = exact_prob_uniform(3, 2, |c| contains(c, &p11, GapMode::Loose).unwrap()).unwrap();
        assert_eq!(r.rational, Some(ratio(1, 3)));
        let r = exact_prob_uniform(3, 2, |c| analysis::extremes(c).cmax >= 1).unwrap();
        assert_eq!(r.rational, Some(ratio(1, 1)));
        let r = exact_prob_uniform(2, 2, analysis::is_carlitz).unwrap();
        assert_eq!(r.rational, Some(ratio(2, 3)));
    }

    #[test]
    fn guard_trips() {
        assert!(matches!(enumerate_uniform(30, 30, |_| {}), Err(Error::GuardExceeded { .. })));
    }
}
