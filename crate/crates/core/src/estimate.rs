//! Monte Carlo estimates with confidence intervals, and the goodness-of-fit
//! statistics used to compare samplers and limit laws.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Discrete, Normal, Poisson};

use crate::error::{Error, Result};

/// Default confidence level.
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    #[default]
    Wilson,
    ClopperPearson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seed: u64,
}

impl EstimateResult {
    /// Binomial standard error at the point estimate.
    pub fn standard_error(&self) -> f64 {
        (self.point * (1.0 - self.point) / self.trials as f64).sqrt()
    }
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("confidence must lie in (0, 1), got {confidence}")))
    }
}

fn z_value(confidence: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    check_confidence(confidence)?;
    if trials == 0 || successes > trials {
        return Err(Error::param("need 0 <= successes <= trials and trials >= 1"));
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z = z_value(confidence);
    let z2 = z * z;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((centre - half).max(0.0).min(phat), (centre + half).min(1.0).max(phat)))
}

/// Exact Clopper-Pearson interval from beta quantiles.
pub fn clopper_pearson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    check_confidence(confidence)?;
    if trials == 0 || successes > trials {
        return Err(Error::param("need 0 <= successes <= trials and trials >= 1"));
    }
    let (x, n) = (successes as f64, trials as f64);
    let tail = (1.0 - confidence) / 2.0;
    let beta = |a: f64, b: f64| Beta::new(a, b).map_err(|e| Error::param(e.to_string()));
    let lo = if successes == 0 { 0.0 } else { beta(x, n - x + 1.0)?.inverse_cdf(tail) };
    let hi = if successes == trials { 1.0 } else { beta(x + 1.0, n - x)?.inverse_cdf(1.0 - tail) };
    Ok((lo, hi))
}

/// Probability estimate `successes / trials` with its interval.
pub fn estimate_probability(
    successes: u64,
    trials: u64,
    seed: u64,
    confidence: f64,
    method: IntervalMethod,
) -> Result<EstimateResult> {
    let (ci_low, ci_high) = match method {
        IntervalMethod::Wilson => wilson_interval(successes, trials, confidence)?,
        IntervalMethod::ClopperPearson => clopper_pearson_interval(successes, trials, confidence)?,
    };
    Ok(EstimateResult { point: successes as f64 / trials as f64, ci_low, ci_high, trials, seed })
}

/// Sample mean with a normal-approximation interval.
pub fn estimate_mean(values: &[f64], seed: u64, confidence: f64) -> Result<EstimateResult> {
    check_confidence(confidence)?;
    if values.is_empty() {
        return Err(Error::param("need at least one value"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let half = z_value(confidence) * (var / n).sqrt();
    Ok(EstimateResult { point: mean, ci_low: mean - half, ci_high: mean + half, trials: values.len() as u64, seed })
}

/// A chi-square test outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

fn chi_square_tail(statistic: f64, dof: u64) -> Result<f64> {
    if dof == 0 {
        return Ok(1.0);
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::param(e.to_string()))?;
    Ok(dist.sf(statistic))
}

/// Merges adjacent bins, left to right, until every merged bin reaches
/// `min` by `weight`. A short final run joins the previous bin.
fn merge_bins(bins: usize, weight: impl Fn(usize) -> f64, min: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    let mut acc = 0.0;
    for i in 0..bins {
        cur.push(i);
        acc += weight(i);
        if acc >= min {
            groups.push(std::mem::take(&mut cur));
            acc = 0.0;
        }
    }
    if !cur.is_empty() {
        match groups.last_mut() {
            Some(last) => last.extend(cur),
            None => groups.push(cur),
        }
    }
    groups
}

/// Pearson goodness of fit of `observed` counts to `probs`. Adjacent bins
/// are pooled until each expects at least 5 observations.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::param("observed and probs must be nonempty and of equal length"));
    }
    let total: u64 = observed.iter().sum();
    let mass: f64 = probs.iter().sum();
    if total == 0 || mass <= 0.0 {
        return Err(Error::param("need at least one observation and positive mass"));
    }
    let expected = |i: usize| probs[i] / mass * total as f64;
    let groups = merge_bins(observed.len(), expected, 5.0);
    let mut statistic = 0.0;
    for g in &groups {
        let o: f64 = g.iter().map(|&i| observed[i] as f64).sum();
        let e: f64 = g.iter().map(|&i| expected(i)).sum();
        if e > 0.0 {
            statistic += (o - e).powi(2) / e;
        } else if o > 0.0 {
            statistic = f64::INFINITY;
        }
    }
    let dof = groups.len() as u64 - 1;
    Ok(ChiSquareTest { statistic, dof, p_value: chi_square_tail(statistic, dof)? })
}

/// Two-sample chi-square homogeneity test on binned counts. Adjacent bins
/// are pooled until each holds at least 10 observations in total.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareTest> {
    let bins = a.len().max(b.len());
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let (na, nb): (f64, f64) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::param("both samples need at least one observation"));
    }
    let groups = merge_bins(bins, |i| get(a, i) + get(b, i), 10.0);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut statistic = 0.0;
    for g in &groups {
        let x: f64 = g.iter().map(|&i| get(a, i)).sum();
        let y: f64 = g.iter().map(|&i| get(b, i)).sum();
        if x + y > 0.0 {
            statistic += (ka * x - kb * y).powi(2) / (x + y);
        }
    }
    let dof = groups.len() as u64 - 1;
    Ok(ChiSquareTest { statistic, dof, p_value: chi_square_tail(statistic, dof)? })
}

/// Counts of each value in `0..bins`, with larger values in the last bin.
pub fn histogram(values: impl IntoIterator<Item = u64>, bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins.max(1)];
    let last = h.len() - 1;
    for v in values {
        h[(v as usize).min(last)] += 1;
    }
    h
}

/// Total variation distance between the empirical law of `counts`
/// (`counts[j]` = number of samples equal to `j`) and Poisson(`mean`).
pub fn poisson_tv_distance(counts: &[u64], mean: f64) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::param("need at least one observation"));
    }
    if mean <= 0.0 {
        let p0 = counts.first().copied().unwrap_or(0) as f64 / total as f64;
        return Ok(1.0 - p0);
    }
    let law = Poisson::new(mean).map_err(|e| Error::param(e.to_string()))?;
    let mut covered = 0.0;
    let mut diff = 0.0;
    for (j, &c) in counts.iter().enumerate() {
        let pj = law.pmf(j as u64);
        covered += pj;
        diff += (c as f64 / total as f64 - pj).abs();
    }
    diff += (1.0 - covered).max(0.0);
    Ok(diff / 2.0)
}
