use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use statrs::function::gamma::ln_gamma;

use super::{neumaier_sum, PredictionKind, TheoryPrediction};
use crate::composition::{binomial, check_p};
use crate::error::{Error, Result};
use crate::patterns::{PatternKind, PatternSpec, Shape};

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    Ok(())
}

/// `n q p + p^2`.
pub fn expected_components(n: u64, p: f64) -> Result<TheoryPrediction> {
    check_n(n)?;
    check_p(p)?;
    let q = 1.0 - p;
    Ok(TheoryPrediction::exact(
        "expected_components",
        PredictionKind::Expectation,
        n as f64 * q * p + p * p,
        "any n, 0 <= p < 1",
    ))
}

/// `n q p + q^2`.
pub fn expected_gaps(n: u64, p: f64) -> Result<TheoryPrediction> {
    check_n(n)?;
    check_p(p)?;
    let q = 1.0 - p;
    Ok(TheoryPrediction::exact(
        "expected_gaps",
        PredictionKind::Expectation,
        n as f64 * q * p + q * q,
        "any n, 0 <= p < 1",
    ))
}

/// `n / (n q + p)`: expected total component length over expected number
/// of components.
pub fn mean_component_length(n: u64, p: f64) -> Result<TheoryPrediction> {
    check_n(n)?;
    check_p(p)?;
    if p == 0.0 {
        return Err(Error::param("mean component length needs p > 0"));
    }
    let q = 1.0 - p;
    Ok(TheoryPrediction::exact(
        "mean_component_length",
        PredictionKind::Expectation,
        n as f64 / (n as f64 * q + p),
        "any n, 0 < p < 1",
    ))
}

/// `n / (n p + q)`.
pub fn mean_gap_length(n: u64, p: f64) -> Result<TheoryPrediction> {
    check_n(n)?;
    check_p(p)?;
    let q = 1.0 - p;
    Ok(TheoryPrediction::exact(
        "mean_gap_length",
        PredictionKind::Expectation,
        n as f64 / (n as f64 * p + q),
        "any n, 0 <= p < 1",
    ))
}

fn require_exact_consecutive(spec: &PatternSpec) -> Result<()> {
    if spec.kind() != PatternKind::Exact || spec.shape() != Shape::Consecutive {
        return Err(Error::param(format!("`{spec}` is not an exact consecutive pattern")));
    }
    Ok(())
}

fn pow_log(k: f64, s: f64, p: f64) -> f64 {
    if p == 0.0 {
        return if s == 0.0 { 1.0 } else { 0.0 };
    }
    (k * (-p).ln_1p() + s * p.ln()).exp()
}

/// `q^k p^s` for an exact consecutive pattern of length `k` and size `s`.
pub fn prob_exact_consecutive_at_position(spec: &PatternSpec, p: f64) -> Result<TheoryPrediction> {
    require_exact_consecutive(spec)?;
    check_p(p)?;
    let value = pow_log(spec.length() as f64, spec.size() as f64, p);
    Ok(TheoryPrediction::exact(
        "prob_exact_consecutive_at_position",
        PredictionKind::Probability,
        value,
        "geometric model, any position i <= n+1-k",
    ))
}

/// `(n + 1 - k) q^k p^s`.
pub fn expected_exact_consecutive_count(n: u64, spec: &PatternSpec, p: f64) -> Result<TheoryPrediction> {
    check_n(n)?;
    let at = prob_exact_consecutive_at_position(spec, p)?;
    let windows = (n + 1).saturating_sub(spec.length() as u64) as f64;
    Ok(TheoryPrediction::exact(
        "expected_exact_consecutive_count",
        PredictionKind::Expectation,
        windows * at.value,
        "geometric model",
    ))
}

/// The `p` maximising `q^k p^s`: setting `s/p = k/q` gives `p = s/(k+s)`.
pub fn argmax_p_exact_consecutive(spec: &PatternSpec) -> Result<f64> {
    require_exact_consecutive(spec)?;
    if spec.size() == 0 {
        return Ok(0.0);
    }
    let (k, s) = (spec.length() as f64, spec.size() as f64);
    Ok(s / (k + s))
}

/// Exact probability that an exact consecutive pattern sits at a fixed
/// position of a uniform `n`-composition of `m`:
/// `binom(m-s+n-k-1, m-s) / binom(m+n-1, m)`.
pub fn prob_exact_consecutive_at_position_uniform(n: u64, m: u64, spec: &PatternSpec) -> Result<TheoryPrediction> {
    require_exact_consecutive(spec)?;
    check_n(n)?;
    let (k, s) = (spec.length() as u64, spec.size());
    let value = if m < s || n < k {
        0.0
    } else if n == k {
        if m == s {
            let total = binomial(m + n - 1, m);
            1.0 / total.to_f64().unwrap_or(f64::INFINITY)
        } else {
            0.0
        }
    } else if m + n <= 5000 {
        let num = BigInt::from(binomial(m - s + n - k - 1, m - s));
        let den = BigInt::from(binomial(m + n - 1, m));
        BigRational::new(num, den).to_f64().unwrap_or(0.0)
    } else {
        let (a, b) = ((m - s + n - k - 1) as f64, (m - s) as f64);
        let (c, d) = ((m + n - 1) as f64, m as f64);
        neumaier_sum([
            ln_gamma(a + 1.0),
            -ln_gamma(b + 1.0),
            -ln_gamma(a - b + 1.0),
            -ln_gamma(c + 1.0),
            ln_gamma(d + 1.0),
            ln_gamma(c - d + 1.0),
        ])
        .exp()
    };
    Ok(TheoryPrediction::exact(
        "prob_exact_consecutive_at_position_uniform",
        PredictionKind::Probability,
        value,
        "uniform model, any position i <= n+1-k",
    ))
}

/// Probability that a consecutive ordering pattern occurs at a fixed
/// position:
/// `prod_{j=0..r} q^{l_j} p^{s_{j+1}} / (1 - p^{s_j})` with `l_j` the
/// multiplicity of value `j` and `s_j = l_j + ... + l_r`.
pub fn prob_ordering_at_position(spec: &PatternSpec, p: f64) -> Result<TheoryPrediction> {
    if spec.kind() != PatternKind::Ordering || spec.shape() != Shape::Consecutive {
        return Err(Error::param(format!("`{spec}` is not a consecutive ordering pattern")));
    }
    check_p(p)?;
    let ls = spec.value_multiplicities();
    let value = if p == 0.0 {
        if ls.len() == 1 {
            1.0
        } else {
            0.0
        }
    } else {
        let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
        let mut suffix: Vec<f64> = vec![0.0; ls.len() + 1];
        for j in (0..ls.len()).rev() {
            suffix[j] = suffix[j + 1] + ls[j] as f64;
        }
        let terms = (0..ls.len()).map(|j| {
            ls[j] as f64 * ln_q + suffix[j + 1] * ln_p - (-(suffix[j] * ln_p).exp_m1()).ln()
        });
        neumaier_sum(terms).exp()
    };
    Ok(TheoryPrediction::exact(
        "prob_ordering_at_position",
        PredictionKind::Probability,
        value,
        "geometric model, any position i <= n+1-k",
    ))
}

/// `P(tmax < r) = (1 - p^r)^n`.
pub fn prob_tmax_lt(n: u64, p: f64, r: u64) -> Result<TheoryPrediction> {
    check_n(n)?;
    check_p(p)?;
    if r == 0 {
        return Err(Error::param("r must be at least 1"));
    }
    let value = if p == 0.0 { 1.0 } else { (n as f64 * (-(r as f64 * p.ln()).exp()).ln_1p()).exp() };
    Ok(TheoryPrediction::exact("prob_tmax_lt", PredictionKind::Probability, value, "geometric model"))
}

/// `P(tmin >= r) = p^(r n)`.
pub fn prob_tmin_ge(n: u64, p: f64, r: u64) -> Result<TheoryPrediction> {
    check_n(n)?;
    check_p(p)?;
    if r == 0 {
        return Err(Error::param("r must be at least 1"));
    }
    let value = if p == 0.0 { 0.0 } else { (r as f64 * n as f64 * p.ln()).exp() };
    Ok(TheoryPrediction::exact("prob_tmin_ge", PredictionKind::Probability, value, "geometric model"))
}
